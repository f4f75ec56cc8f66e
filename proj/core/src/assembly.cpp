#include "kgwell/assembly.hpp"

#include "kgwell/error.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace kgwell {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Index n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

/// Boundary quadrature on a facet: (point, weight, basis value at each facet vertex).
struct FacetPoint {
  Point x;
  double weight;
  std::array<double, 2> phi;
};

std::vector<FacetPoint> facet_rule(const Mesh& mesh, const BoundaryFacet& f) {
  const Point& a = mesh.vertex(f.vertices[0]);
  if (f.vertex_count() == 1) return {{a, 1.0, {1.0, 0.0}}};
  const Point& b = mesh.vertex(f.vertices[1]);
  std::vector<double> nodes, weights;
  gauss_legendre(3, nodes, weights);
  std::vector<FacetPoint> pts;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double s = nodes[q];
    pts.push_back({(1.0 - s) * a + s * b, weights[q] * f.measure, {1.0 - s, s}});
  }
  return pts;
}

inline double signed_pow(double x, double p) { return std::copysign(std::pow(std::abs(x), p), x); }

}  // namespace

Vector DofMap::expand(const Vector& free) const {
  if (free.size() != free_count()) throw InvalidInput("vector size does not match the free dofs");
  Vector nodal = Vector::Zero(node_count());
  for (Index k = 0; k < free_count(); ++k) nodal[node_of_free[static_cast<std::size_t>(k)]] = free[k];
  return nodal;
}

Vector DofMap::restrict(const Vector& nodal) const {
  if (nodal.size() != node_count()) throw InvalidInput("vector size does not match the mesh vertices");
  Vector free(free_count());
  for (Index k = 0; k < free_count(); ++k) free[k] = nodal[node_of_free[static_cast<std::size_t>(k)]];
  return free;
}

DofMap make_dof_map(const Mesh& mesh, const BoundaryPartition& partition) {
  if (partition.labels.size() != mesh.facets().size()) {
    throw InvalidInput("partition does not belong to this mesh");
  }
  std::vector<bool> constrained(static_cast<std::size_t>(mesh.vertex_count()), false);
  for (std::size_t i = 0; i < mesh.facets().size(); ++i) {
    if (partition.is_gamma1(i)) continue;
    const auto& f = mesh.facets()[i];
    for (int k = 0; k < f.vertex_count(); ++k) {
      constrained[static_cast<std::size_t>(f.vertices[static_cast<std::size_t>(k)])] = true;
    }
  }
  DofMap dofs;
  dofs.free_of_node.assign(constrained.size(), -1);
  for (std::size_t v = 0; v < constrained.size(); ++v) {
    if (constrained[v]) continue;
    dofs.free_of_node[v] = static_cast<Index>(dofs.node_of_free.size());
    dofs.node_of_free.push_back(static_cast<Index>(v));
  }
  return dofs;
}

DampingSpec DampingSpec::multiplier(const BoundaryPartition& partition) {
  const Point x0 = partition.x0;
  return {[x0](const Point& x, const Point& normal) { return multiplier_field(x, x0).dot(normal); },
          partition.m0};
}

DampingSpec DampingSpec::constant(double value) {
  return {[value](const Point&, const Point&) { return value; }, value};
}

FullOperators assemble_full(const Mesh& mesh, const BoundaryPartition& partition,
                            const DampingSpec& damping) {
  if (!(damping.floor > 0.0)) throw InvalidInput("damping floor delta0 must be positive");
  if (partition.labels.size() != mesh.facets().size()) {
    throw InvalidInput("partition does not belong to this mesh");
  }
  const Index n = mesh.vertex_count();
  const int nv = mesh.vertices_per_element();
  const SimplexQuadrature rule(mesh.dimension(), 2);

  Triplets tm, tk, tg, tb, tt;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    const double vol = mesh.element_volume(e);
    const auto grads = mesh.basis_gradients(e);
    // exact P1 mass: vol / ((d+1)(d+2)) * (1 + delta_ij)
    const double mass_scale = vol / static_cast<double>(nv * (nv + 1));
    for (int i = 0; i < nv; ++i) {
      for (int j = 0; j < nv; ++j) {
        tm.emplace_back(el[i], el[j], mass_scale * (i == j ? 2.0 : 1.0));
        tk.emplace_back(el[i], el[j], vol * grads[i].dot(grads[j]));
      }
    }
    for (const auto& q : rule.reference()) {
      const Point m = multiplier_field(mesh.map_to_physical(e, q.bary), partition.x0);
      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
          tg.emplace_back(el[i], el[j], vol * q.weight * q.bary[i] * m.dot(grads[j]));
        }
      }
    }
  }

  for (std::size_t fi = 0; fi < mesh.facets().size(); ++fi) {
    if (!partition.is_gamma1(fi)) continue;
    const auto& f = mesh.facets()[fi];
    const int fv = f.vertex_count();
    for (const auto& q : facet_rule(mesh, f)) {
      const double d = damping.delta(q.x, f.normal);
      if (!(d >= damping.floor)) {
        throw InvalidInput("damping coefficient " + std::to_string(d) +
                           " is below its floor delta0 = " + std::to_string(damping.floor) +
                           " on Gamma1");
      }
      for (int a = 0; a < fv; ++a) {
        for (int b = 0; b < fv; ++b) {
          const double base = q.weight * q.phi[static_cast<std::size_t>(a)] * q.phi[static_cast<std::size_t>(b)];
          const Index ia = f.vertices[static_cast<std::size_t>(a)];
          const Index ib = f.vertices[static_cast<std::size_t>(b)];
          tt.emplace_back(ia, ib, base);
          tb.emplace_back(ia, ib, d * base);
        }
      }
    }
  }

  return {from_triplets(n, tm), from_triplets(n, tk), from_triplets(n, tb), from_triplets(n, tg),
          from_triplets(n, tt)};
}

SparseMatrix restrict_matrix(const SparseMatrix& full, const DofMap& dofs) {
  Triplets t;
  for (Index col = 0; col < full.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(full, col); it; ++it) {
      const Index r = dofs.free_of_node[static_cast<std::size_t>(it.row())];
      const Index c = dofs.free_of_node[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  }
  return from_triplets(dofs.free_count(), t);
}

DiscreteOperators assemble_operators(const Mesh& mesh, const BoundaryPartition& partition,
                                     const DampingSpec& damping) {
  const FullOperators full = assemble_full(mesh, partition, damping);
  DiscreteOperators ops;
  ops.dofs = make_dof_map(mesh, partition);
  ops.M = restrict_matrix(full.M, ops.dofs);
  ops.K = restrict_matrix(full.K, ops.dofs);
  ops.B = restrict_matrix(full.B, ops.dofs);
  ops.G = restrict_matrix(full.G, ops.dofs);
  ops.T = restrict_matrix(full.T, ops.dofs);
  ops.delta_floor = damping.floor;
  return ops;
}

void write_coo(std::ostream& os, const SparseMatrix& matrix) {
  os << std::setprecision(17);
  for (Index col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

int CouplingSpec::default_order(double rho) {
  return std::max(4, static_cast<int>(std::ceil(2.0 * rho + 2.0)));
}

void CouplingSpec::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("coupling exponent rho must be positive");
  if (quadrature_order < static_cast<int>(std::ceil(2.0 * rho + 2.0))) {
    throw InvalidInput("quadrature order must be at least ceil(2 rho + 2)");
  }
}

CouplingEvaluator::CouplingEvaluator(const Mesh& mesh, const DofMap& dofs, CouplingSpec spec)
    : mesh_(&mesh), dofs_(&dofs), spec_(spec), quadrature_(mesh.dimension(), spec.quadrature_order) {
  spec_.validate();
  if (dofs.node_count() != mesh.vertex_count()) throw InvalidInput("dof map does not belong to this mesh");
}

template <class Fn>
void CouplingEvaluator::for_each_point(const Vector& u_nodal, const Vector& v_nodal, Fn&& fn) const {
  const Mesh& mesh = *mesh_;
  const int nv = mesh.vertices_per_element();
  std::vector<QuadPoint> points;
  std::array<Eigen::Vector3d, 2> values;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    values[0].setZero();
    values[1].setZero();
    for (int k = 0; k < nv; ++k) {
      values[0][k] = u_nodal[el[k]];
      values[1][k] = v_nodal[el[k]];
    }
    if (values[0].head(nv).isZero(0.0) || values[1].head(nv).isZero(0.0)) continue;
    quadrature_.split(values, points);
    const double vol = mesh.element_volume(e);
    for (const auto& q : points) {
      const double uh = q.bary.dot(values[0]);
      const double vh = q.bary.dot(values[1]);
      fn(e, el, q, vol * q.weight, uh, vh);
    }
  }
}

std::pair<Vector, Vector> CouplingEvaluator::vectors(const Vector& u, const Vector& v) const {
  const Vector un = dofs_->expand(u);
  const Vector vn = dofs_->expand(v);
  Vector fu_full = Vector::Zero(un.size());
  Vector fv_full = Vector::Zero(un.size());
  const double rho = spec_.rho;
  const int nv = mesh_->vertices_per_element();
  for_each_point(un, vn, [&](Index, const std::array<Index, 3>& el, const QuadPoint& q, double w,
                             double uh, double vh) {
    const double au = std::pow(std::abs(uh), rho);
    const double av = std::pow(std::abs(vh), rho);
    const double gu = w * au * av * vh;
    const double gv = w * au * uh * av;
    for (int k = 0; k < nv; ++k) {
      fu_full[el[k]] += gu * q.bary[k];
      fv_full[el[k]] += gv * q.bary[k];
    }
  });
  return {dofs_->restrict(fu_full), dofs_->restrict(fv_full)};
}

double CouplingEvaluator::energy(const Vector& u, const Vector& v) const {
  const Vector un = dofs_->expand(u);
  const Vector vn = dofs_->expand(v);
  const double rho = spec_.rho;
  double total = 0.0;
  for_each_point(un, vn, [&](Index, const std::array<Index, 3>&, const QuadPoint&, double w, double uh,
                             double vh) { total += w * signed_pow(uh, rho + 1.0) * signed_pow(vh, rho + 1.0); });
  return total / (rho + 1.0);
}

CouplingEvaluator::Jacobian CouplingEvaluator::jacobian(const Vector& u, const Vector& v) const {
  const double rho = spec_.rho;
  if (rho < 1.0) throw InvalidInput("coupling Jacobian requires rho >= 1");
  const Vector un = dofs_->expand(u);
  const Vector vn = dofs_->expand(v);
  const int nv = mesh_->vertices_per_element();
  Triplets tuu, tuv, tvv;
  const auto& free = dofs_->free_of_node;
  for_each_point(un, vn, [&](Index, const std::array<Index, 3>& el, const QuadPoint& q, double w,
                             double uh, double vh) {
    const double au = std::abs(uh);
    const double av = std::abs(vh);
    // d/du (|u|^rho) = rho |u|^(rho-1) sgn(u)
    const double duu = w * rho * signed_pow(uh, rho - 1.0) * std::pow(av, rho) * vh;
    const double dvv = w * rho * std::pow(au, rho) * uh * signed_pow(vh, rho - 1.0);
    const double duv = w * (rho + 1.0) * std::pow(au, rho) * std::pow(av, rho);
    for (int i = 0; i < nv; ++i) {
      const Index fi = free[static_cast<std::size_t>(el[i])];
      if (fi < 0) continue;
      for (int j = 0; j < nv; ++j) {
        const Index fj = free[static_cast<std::size_t>(el[j])];
        if (fj < 0) continue;
        const double pij = q.bary[i] * q.bary[j];
        tuu.emplace_back(fi, fj, duu * pij);
        tuv.emplace_back(fi, fj, duv * pij);
        tvv.emplace_back(fi, fj, dvv * pij);
      }
    }
  });
  const Index n = dofs_->free_count();
  Jacobian jac{from_triplets(n, tuu), from_triplets(n, tuv), SparseMatrix(), from_triplets(n, tvv)};
  jac.vu = jac.uv;
  return jac;
}

}  // namespace kgwell
