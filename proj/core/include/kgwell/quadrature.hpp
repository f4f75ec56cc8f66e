#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace kgwell {

/// Quadrature node in barycentric coordinates of a simplex. Weights are
/// relative to the simplex measure, so a rule's weights sum to one.
struct QuadPoint {
  Eigen::Vector3d bary;
  double weight;
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int points, std::vector<double>& nodes, std::vector<double>& weights);

/// Simplex quadrature exact for polynomials up to a given total degree, with
/// optional splitting of the simplex along the zero sets of linear functions.
///
/// Splitting makes integrands such as |u|^p u (u linear) piecewise
/// polynomial on each sub-cell, so the rule stays exact across sign changes.
class SimplexQuadrature {
 public:
  SimplexQuadrature(int dimension, int degree);

  int dimension() const { return dimension_; }
  int degree() const { return degree_; }
  const std::vector<QuadPoint>& reference() const { return reference_; }

  /// Fills `out` with a rule on the sub-cells where every function in
  /// `vertex_values` (values at the simplex vertices) has constant sign.
  void split(std::span<const Eigen::Vector3d> vertex_values, std::vector<QuadPoint>& out) const;

 private:
  int dimension_;
  int degree_;
  std::vector<QuadPoint> reference_;
};

}  // namespace kgwell
