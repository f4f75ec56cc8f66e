#include "kgwell/geometry.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace kgwell {

std::size_t BoundaryPartition::gamma1_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), FacetLabel::Gamma1));
}

std::vector<Point> facet_sample_points(const Mesh& mesh, const BoundaryFacet& facet) {
  const Point& a = mesh.vertex(facet.vertices[0]);
  if (facet.vertex_count() == 1) return {a};
  const Point& b = mesh.vertex(facet.vertices[1]);
  const double g = std::sqrt(0.6);
  std::vector<Point> pts{a, b};
  for (double s : {-g, 0.0, g}) pts.push_back(0.5 * (1.0 - s) * a + 0.5 * (1.0 + s) * b);
  return pts;
}

BoundaryPartition classify_boundary(const Mesh& mesh, const Point& x0) {
  if (!x0.allFinite()) throw InvalidInput("star point x0 must be finite");

  BoundaryPartition part;
  part.x0 = x0;
  for (const auto& v : mesh.vertices()) part.R = std::max(part.R, multiplier_field(v, x0).norm());

  const double zero_tol = 1e-12 * std::max(part.R, 1e-300);
  part.m0 = std::numeric_limits<double>::infinity();
  part.labels.reserve(mesh.facets().size());
  for (std::size_t i = 0; i < mesh.facets().size(); ++i) {
    const auto& f = mesh.facets()[i];
    bool any_positive = false;
    bool any_nonpositive = false;
    double facet_min = std::numeric_limits<double>::infinity();
    for (const auto& x : facet_sample_points(mesh, f)) {
      double mn = multiplier_field(x, x0).dot(f.normal);
      if (std::abs(mn) <= zero_tol) mn = 0.0;
      (mn > 0.0 ? any_positive : any_nonpositive) = true;
      facet_min = std::min(facet_min, mn);
    }
    if (any_positive && any_nonpositive) {
      throw MixedFacetError("m.nu changes sign on boundary facet " + std::to_string(i) +
                            "; refine the mesh");
    }
    part.labels.push_back(any_positive ? FacetLabel::Gamma1 : FacetLabel::Gamma0);
    if (any_positive) part.m0 = std::min(part.m0, facet_min);
  }
  if (part.gamma1_count() == 0) {
    throw EmptyGamma1Error("no boundary facet has m.nu > 0 for the chosen x0");
  }

  std::set<Index> gamma0_vertices, gamma1_vertices;
  for (std::size_t i = 0; i < mesh.facets().size(); ++i) {
    const auto& f = mesh.facets()[i];
    auto& target = part.is_gamma1(i) ? gamma1_vertices : gamma0_vertices;
    for (int k = 0; k < f.vertex_count(); ++k) target.insert(f.vertices[static_cast<std::size_t>(k)]);
  }
  std::size_t shared = 0;
  for (Index v : gamma1_vertices) shared += gamma0_vertices.count(v);
  if (shared > 0) {
    part.warnings.push_back("closures of Gamma0 and Gamma1 touch at " + std::to_string(shared) +
                            " vertex(es); facets are attributed wholly to one part");
  }
  return part;
}

GeometryConstants geometry_constants(const BoundaryPartition& partition) {
  return {partition.R, partition.m0};
}

}  // namespace kgwell
