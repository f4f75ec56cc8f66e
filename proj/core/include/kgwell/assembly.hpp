#pragma once

#include "kgwell/geometry.hpp"
#include "kgwell/mesh.hpp"
#include "kgwell/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

namespace kgwell {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Maps mesh vertices to free degrees of freedom. Vertices on the closure of
/// Gamma0 are eliminated (u = 0 there).
struct DofMap {
  std::vector<Index> free_of_node;  // -1 for constrained vertices
  std::vector<Index> node_of_free;

  Index free_count() const { return static_cast<Index>(node_of_free.size()); }
  Index node_count() const { return static_cast<Index>(free_of_node.size()); }
  /// Free coefficients -> nodal values, zero on constrained vertices.
  Vector expand(const Vector& free) const;
  /// Nodal values -> free coefficients (constrained values are dropped).
  Vector restrict(const Vector& nodal) const;
};

DofMap make_dof_map(const Mesh& mesh, const BoundaryPartition& partition);

/// Damping coefficient on Gamma1 with its lower bound delta0 > 0.
struct DampingSpec {
  std::function<double(const Point& x, const Point& normal)> delta;
  double floor = 0.0;

  /// delta = m.nu with floor m0.
  static DampingSpec multiplier(const BoundaryPartition& partition);
  static DampingSpec constant(double value);
};

/// Operators over the full vertex set, before Dirichlet elimination.
struct FullOperators {
  SparseMatrix M;  // mass
  SparseMatrix K;  // stiffness
  SparseMatrix B;  // int_Gamma1 delta phi_i phi_j
  SparseMatrix G;  // int phi_i (m . grad phi_j)
  SparseMatrix T;  // int_Gamma1 phi_i phi_j
};

/// P1 Galerkin operators restricted to the free degrees of freedom.
struct DiscreteOperators {
  SparseMatrix M;
  SparseMatrix K;
  SparseMatrix B;
  SparseMatrix G;
  SparseMatrix T;
  DofMap dofs;
  double delta_floor = 0.0;

  Index size() const { return dofs.free_count(); }
};

FullOperators assemble_full(const Mesh& mesh, const BoundaryPartition& partition,
                            const DampingSpec& damping);

/// Throws InvalidInput if delta drops below its floor at any Gamma1
/// quadrature point, or if the floor is not positive.
DiscreteOperators assemble_operators(const Mesh& mesh, const BoundaryPartition& partition,
                                     const DampingSpec& damping);

/// Restriction of a full-vertex matrix to the free dofs.
SparseMatrix restrict_matrix(const SparseMatrix& full, const DofMap& dofs);

/// Coordinate-format text export: one `row col value` line per stored entry.
void write_coo(std::ostream& os, const SparseMatrix& matrix);

/// Exponent and quadrature degree of the coupling |u|^rho |v|^rho v.
struct CouplingSpec {
  double rho = 1.0;
  int quadrature_order = 4;

  /// max(4, ceil(2 rho + 2)).
  static int default_order(double rho);
  static CouplingSpec with_rho(double rho) { return {rho, default_order(rho)}; }
  void validate() const;
};

/// Evaluates the coupling terms of the semi-discrete system by element
/// quadrature. Elements are split along the zero lines of u_h and v_h, so
/// for integer rho the integrals are exact up to rounding.
class CouplingEvaluator {
 public:
  CouplingEvaluator(const Mesh& mesh, const DofMap& dofs, CouplingSpec spec);

  const CouplingSpec& spec() const { return spec_; }

  /// F_u[i] = int |u|^rho |v|^rho v phi_i,  F_v[i] = int |u|^rho u |v|^rho phi_i.
  std::pair<Vector, Vector> vectors(const Vector& u, const Vector& v) const;

  /// (1 / (rho + 1)) int (|u|^rho u)(|v|^rho v).
  double energy(const Vector& u, const Vector& v) const;

  /// Jacobian blocks d(F_u, F_v) / d(u, v); requires rho >= 1.
  struct Jacobian {
    SparseMatrix uu, uv, vu, vv;
  };
  Jacobian jacobian(const Vector& u, const Vector& v) const;

 private:
  template <class Fn>
  void for_each_point(const Vector& u_nodal, const Vector& v_nodal, Fn&& fn) const;

  const Mesh* mesh_;
  const DofMap* dofs_;
  CouplingSpec spec_;
  SimplexQuadrature quadrature_;
};

}  // namespace kgwell
