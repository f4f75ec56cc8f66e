#pragma once

#include "kgwell/mesh.hpp"

#include <string>
#include <vector>

namespace kgwell {

/// m(x) = x - x0.
inline Point multiplier_field(const Point& x, const Point& x0) { return x - x0; }

/// Facet labels for the Dirichlet part Gamma0 (m.nu <= 0) and the
/// dissipative part Gamma1 (m.nu > 0), with the geometric constants
/// R = max |m| over vertices and m0 = min m.nu over Gamma1.
struct BoundaryPartition {
  Point x0 = Point::Zero();
  std::vector<FacetLabel> labels;
  double R = 0.0;
  double m0 = 0.0;
  std::vector<std::string> warnings;

  bool is_gamma1(std::size_t facet) const { return labels[facet] == FacetLabel::Gamma1; }
  std::size_t gamma1_count() const;
  std::size_t gamma0_count() const { return labels.size() - gamma1_count(); }
};

struct GeometryConstants {
  double R;
  double m0;
};

/// Sample points on a facet used for classification and boundary quadrature:
/// the point itself in 1D; both endpoints and the three-point Gauss nodes in 2D.
std::vector<Point> facet_sample_points(const Mesh& mesh, const BoundaryFacet& facet);

/// Labels every facet by the sign of m.nu at its sample points.
///
/// Values with |m.nu| <= 1e-12 * R count as zero and therefore as Gamma0.
/// Throws MixedFacetError if m.nu changes sign on a facet and
/// EmptyGamma1Error if no facet ends up in Gamma1. When the closures of
/// Gamma0 and Gamma1 touch (corners of a polygon) a warning is recorded.
BoundaryPartition classify_boundary(const Mesh& mesh, const Point& x0);

GeometryConstants geometry_constants(const BoundaryPartition& partition);

}  // namespace kgwell
