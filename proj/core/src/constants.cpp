#include "kgwell/constants.hpp"

#include "kgwell/error.hpp"
#include "kgwell/quadrature.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kgwell {

namespace {

using Cholesky = Eigen::SimplicialLDLT<SparseMatrix>;

bool factor_positive_definite(Cholesky& solver, const SparseMatrix& a) {
  if (a.rows() == 0) return false;
  solver.compute(a);
  return solver.info() == Eigen::Success && solver.vectorD().minCoeff() > 0.0;
}

double v_norm(const SparseMatrix& k, const Vector& x) { return std::sqrt(std::max(0.0, x.dot(k * x))); }

int lp_degree(double p) { return static_cast<int>(std::ceil(p)) + 2; }

/// int |v|^p over Omega, and optionally g_i = int |v|^(p-2) v phi_i.
double domain_lp_power(const Mesh& mesh, const DofMap& dofs, const Vector& v, double p, Vector* grad) {
  const Vector nodal = dofs.expand(v);
  const SimplexQuadrature rule(mesh.dimension(), lp_degree(p));
  const int nv = mesh.vertices_per_element();
  Vector g_full;
  if (grad != nullptr) g_full = Vector::Zero(nodal.size());
  std::vector<QuadPoint> pts;
  std::array<Eigen::Vector3d, 1> values;
  double total = 0.0;
  for (Index e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    values[0].setZero();
    for (int k = 0; k < nv; ++k) values[0][k] = nodal[el[k]];
    if (values[0].isZero(0.0)) continue;
    rule.split(values, pts);
    const double vol = mesh.element_volume(e);
    for (const auto& q : pts) {
      const double vh = q.bary.dot(values[0]);
      const double a = std::pow(std::abs(vh), p - 2.0);
      total += vol * q.weight * a * vh * vh;
      if (grad != nullptr) {
        for (int k = 0; k < nv; ++k) g_full[el[k]] += vol * q.weight * a * vh * q.bary[k];
      }
    }
  }
  if (grad != nullptr) *grad = dofs.restrict(g_full);
  return total;
}

/// Same over Gamma1 facets.
double trace_lp_power(const Mesh& mesh, const BoundaryPartition& partition, const DofMap& dofs,
                      const Vector& w, double p, Vector* grad) {
  const Vector nodal = dofs.expand(w);
  Vector g_full;
  if (grad != nullptr) g_full = Vector::Zero(nodal.size());
  const SimplexQuadrature rule(1, lp_degree(p));
  std::vector<QuadPoint> pts;
  std::array<Eigen::Vector3d, 1> values;
  double total = 0.0;
  for (std::size_t fi = 0; fi < mesh.facets().size(); ++fi) {
    if (!partition.is_gamma1(fi)) continue;
    const auto& f = mesh.facets()[fi];
    if (f.vertex_count() == 1) {
      const double wh = nodal[f.vertices[0]];
      const double a = std::pow(std::abs(wh), p - 2.0);
      total += wh == 0.0 ? 0.0 : a * wh * wh;
      if (grad != nullptr && wh != 0.0) g_full[f.vertices[0]] += a * wh;
      continue;
    }
    values[0] = Eigen::Vector3d(nodal[f.vertices[0]], nodal[f.vertices[1]], 0.0);
    if (values[0].isZero(0.0)) continue;
    rule.split(values, pts);
    for (const auto& q : pts) {
      const double wh = q.bary.dot(values[0]);
      const double a = std::pow(std::abs(wh), p - 2.0);
      total += f.measure * q.weight * a * wh * wh;
      if (grad != nullptr) {
        for (int k = 0; k < 2; ++k) g_full[f.vertices[static_cast<std::size_t>(k)]] += f.measure * q.weight * a * wh * q.bary[k];
      }
    }
  }
  if (grad != nullptr) *grad = dofs.restrict(g_full);
  return total;
}

template <class PowerFn>
SupremumResult maximize_quotient(const DiscreteOperators& ops, double p, const SupremumOptions& options,
                                 PowerFn&& power) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw InvalidInput("exponent p must be finite and >= 2");
  Cholesky k_solver;
  if (!factor_positive_definite(k_solver, ops.K)) {
    throw NumericalSetupError("stiffness matrix is singular on the free dofs (is Gamma0 empty?)");
  }
  const Index n = ops.size();

  std::vector<Vector> starts;
  starts.push_back(first_eigenpair(ops).vector);
  starts.push_back(Vector::Ones(n));
  std::mt19937_64 rng(20240611ULL);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int s = 0; s < options.random_starts; ++s) {
    Vector r(n);
    for (Index i = 0; i < n; ++i) r[i] = dist(rng);
    starts.push_back(r);
  }

  SupremumResult best;
  best.value = -1.0;
  int failed = 0;
  for (Vector v : starts) {
    double nv = v_norm(ops.K, v);
    if (!(nv > 0.0)) continue;
    v /= nv;
    std::vector<double> history;
    Vector grad;
    double q = std::pow(power(v, &grad), 1.0 / p);
    history.push_back(q);
    bool converged = false;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
      if (!(grad.norm() > 0.0)) break;  // function vanishes on the target set
      Vector w = k_solver.solve(grad);
      nv = v_norm(ops.K, w);
      if (!(nv > 0.0) || !std::isfinite(nv)) break;
      v = w / nv;
      const double q_new = std::pow(power(v, &grad), 1.0 / p);
      history.push_back(q_new);
      const double change = std::abs(q_new - q);
      q = q_new;
      if (change <= options.tolerance * std::max(1.0, std::abs(q))) {
        converged = true;
        ++it;
        break;
      }
    }
    // a start that degenerates (zero trace, say) counts as converged at its value
    if (!converged && it >= options.max_iterations) {
      ++failed;
      continue;
    }
    if (q > best.value) {
      best.value = q;
      best.maximizer = v;
      best.iterations = it;
      best.quotient_history = std::move(history);
    }
  }
  if (best.value < 0.0) {
    throw NumericalSetupError(failed > 0 ? "best-constant iteration did not converge within " +
                                               std::to_string(options.max_iterations) + " iterations"
                                         : "no usable start vector for the best-constant iteration");
  }
  return best;
}

constexpr double kRegimeTol = 1e-12;

}  // namespace

EigenPair first_eigenpair(const DiscreteOperators& operators, const EigenOptions& options) {
  const SparseMatrix& K = operators.K;
  const SparseMatrix& M = operators.M;
  if (operators.size() == 0) throw NumericalSetupError("no free degrees of freedom");
  Cholesky m_solver;
  if (!factor_positive_definite(m_solver, M)) throw NumericalSetupError("mass matrix is singular");
  Cholesky k_solver;
  if (!factor_positive_definite(k_solver, K)) {
    throw NumericalSetupError("stiffness matrix is singular on the free dofs (is Gamma0 empty?)");
  }

  EigenPair out;
  Vector x = Vector::Ones(operators.size());
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  const auto finish = [&](Vector v) {
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    out.vector = v / v_norm(K, v);
    return out;
  };
  for (int it = 1; it <= options.max_iterations; ++it) {
    Vector y = k_solver.solve(M * x);
    x = y / std::sqrt(y.dot(M * y));
    const Vector kx = K * x;
    const Vector mx = M * x;
    out.value = x.dot(kx) / x.dot(mx);
    out.residual = (kx - out.value * mx).norm() / mx.norm();
    out.iterations = it;
    if (out.residual < options.tolerance) return finish(x);
    // stagnation at the rounding floor of K x (fine meshes)
    stalled = out.residual < 0.5 * best ? 0 : stalled + 1;
    best = std::min(best, out.residual);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * (K.cwiseAbs() * x.cwiseAbs()).norm() / mx.norm();
    if (stalled >= 5 && out.residual < floor) return finish(x);
  }
  throw NumericalSetupError("inverse iteration for the first eigenvalue did not converge");
}

double first_eigenvalue(const DiscreteOperators& operators, const EigenOptions& options) {
  return first_eigenpair(operators, options).value;
}

double lp_norm(const Mesh& mesh, const DofMap& dofs, const Vector& v, double p) {
  return std::pow(domain_lp_power(mesh, dofs, v, p, nullptr), 1.0 / p);
}

double trace_lp_norm(const Mesh& mesh, const BoundaryPartition& partition, const DofMap& dofs,
                     const Vector& w, double p) {
  return std::pow(trace_lp_power(mesh, partition, dofs, w, p, nullptr), 1.0 / p);
}

SupremumResult embedding_constant(const Mesh& mesh, const DiscreteOperators& operators, double p,
                                  const SupremumOptions& options) {
  return maximize_quotient(operators, p, options, [&](const Vector& v, Vector* grad) {
    return domain_lp_power(mesh, operators.dofs, v, p, grad);
  });
}

SupremumResult trace_constant(const Mesh& mesh, const BoundaryPartition& partition,
                              const DiscreteOperators& operators, double p, const SupremumOptions& options) {
  if (partition.gamma1_count() == 0) throw EmptyGamma1Error("trace constant needs a nonempty Gamma1");
  return maximize_quotient(operators, p, options, [&](const Vector& w, Vector* grad) {
    return trace_lp_power(mesh, partition, operators.dofs, w, p, grad);
  });
}

WellConstants well_constants(double rho, int n, double c0, double c1, double c2, double c3, double lambda1,
                             double R, double m0) {
  for (double x : {c0, c1, c2, c3, lambda1, R, m0}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidInput("well constants need positive finite inputs");
  }
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  if (n < 1) throw InvalidInput("dimension must be positive");

  WellConstants w;
  w.rho = rho;
  w.n = n;
  w.c0 = c0;
  w.c1 = c1;
  w.c2 = c2;
  w.c3 = c3;
  w.lambda1 = lambda1;
  w.R = R;
  w.m0 = m0;
  const double nm1 = static_cast<double>(n - 1);
  w.N = std::pow(c0, 2.0 * (rho + 1.0)) / (2.0 * (rho + 1.0));
  w.lambda_star = std::pow(1.0 / (4.0 * w.N), 1.0 / (2.0 * rho));
  const double c1_4 = std::pow(c1, 4);
  w.N1 = 0.5 * c1_4 * (n + 0.25) + 0.5 * R * std::pow(c2, 4) + c1_4 * nm1;
  w.lambda1_star = std::sqrt(1.0 / (4.0 * w.N1));
  w.P = 4.0 * (2.0 * R + nm1 / 2.0 + nm1 / (2.0 * lambda1));
  w.D = R * R * R + R + R * R * nm1 * nm1 * c3 * c3;
  w.tau = std::min(1.0 / (2.0 * w.P), m0 / w.D);
  return w;
}

double well_function(double lambda, double N, double rho) {
  if (!(lambda >= 0.0)) throw InvalidInput("well function requires lambda >= 0");
  return 0.25 * lambda * lambda - N * std::pow(lambda, 2.0 * (rho + 1.0));
}

AdmissibilityReport admissibility(const Vector& u0, const Vector& v0, const Vector& u1, const Vector& v1,
                                  const WellConstants& constants, const DiscreteOperators& operators,
                                  WellSet set) {
  const Index n = operators.size();
  if (u0.size() != n || v0.size() != n || u1.size() != n || v1.size() != n) {
    throw InvalidInput("initial data must be sized to the free dofs");
  }
  AdmissibilityReport r;
  r.set = set;
  r.norm_u0 = v_norm(operators.K, u0);
  r.norm_v0 = v_norm(operators.K, v0);
  r.l2_u1 = std::sqrt(std::max(0.0, u1.dot(operators.M * u1)));
  r.l2_v1 = std::sqrt(std::max(0.0, v1.dot(operators.M * v1)));

  double coeff = constants.N;
  double power = 2.0 * (constants.rho + 1.0);
  r.threshold = constants.lambda_star;
  if (set == WellSet::RhoOne) {
    coeff = constants.N1;
    power = 4.0;
    r.threshold = constants.lambda1_star;
  }
  r.L = 0.5 * (r.l2_u1 * r.l2_u1 + r.l2_v1 * r.l2_v1) + 0.5 * (r.norm_u0 * r.norm_u0 + r.norm_v0 * r.norm_v0) +
        coeff * (std::pow(r.norm_u0, power) + std::pow(r.norm_v0, power));
  r.norms_below_lambda_star = r.norm_u0 < r.threshold && r.norm_v0 < r.threshold;
  r.L_below_quarter_lambda_star_sq = r.L < 0.25 * r.threshold * r.threshold;
  r.admissible = r.norms_below_lambda_star && r.L_below_quarter_lambda_star_sq;
  return r;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::WeakLowDimension: return "weak-low-dimension";
    case Regime::WeakModerateDimension: return "weak-moderate-dimension";
    case Regime::WeakCriticalDimension: return "weak-critical-dimension";
    case Regime::RegularRhoOne: return "regular-rho-one";
    case Regime::RegularLowDimension: return "regular-low-dimension";
  }
  return "unknown";
}

bool ValidationReport::valid() const {
  return std::any_of(checks.begin(), checks.end(), [](const RegimeCheck& c) {
    return c.satisfied && (c.regime == Regime::WeakLowDimension || c.regime == Regime::WeakModerateDimension ||
                           c.regime == Regime::WeakCriticalDimension);
  });
}

bool ValidationReport::decay_applicable() const {
  return std::any_of(checks.begin(), checks.end(), [](const RegimeCheck& c) {
    return c.satisfied && (c.regime == Regime::RegularRhoOne || c.regime == Regime::RegularLowDimension);
  });
}

ValidationReport validate_hypotheses(double rho, int n, std::optional<double> theta) {
  ValidationReport r;
  r.rho = rho;
  r.n = n;
  r.theta = theta;
  const bool rho_ok = rho > 0.0 && std::isfinite(rho);
  const double nd = static_cast<double>(n);
  std::ostringstream d;
  d.precision(17);

  if (n == 1 || n == 2) {
    RegimeCheck c{Regime::WeakLowDimension, false, {}};
    if (theta) {
      c.satisfied = rho_ok && *theta > 1.0 && 4.0 * rho * *theta >= 1.0 - kRegimeTol;
      d << "4 rho theta = " << 4.0 * rho * *theta << " (needs >= 1, theta > 1)";
    } else {
      c.satisfied = rho_ok;
      d << "theta free; any theta > max(1, 1/(4 rho))";
      if (rho_ok) d << " = " << std::max(1.0, 1.0 / (4.0 * rho));
    }
    c.detail = d.str();
    r.checks.push_back(c);
  } else if (n >= 3 && n <= 6) {
    const double lo = (nd + 2.0) / (8.0 * nd);
    const double hi = (nd + 2.0) / (4.0 * (nd - 2.0));
    d << lo << " <= rho <= " << hi;
    r.checks.push_back({Regime::WeakModerateDimension, rho_ok && rho >= lo - kRegimeTol && rho <= hi + kRegimeTol,
                        d.str()});
  } else if (n >= 7 && n <= 11) {
    const double rho_req = 2.0 / (nd - 2.0);
    const double theta_req = nd / (nd - 2.0);
    d << "rho = " << rho_req << ", theta = " << theta_req;
    const bool theta_ok = !theta || std::abs(*theta - theta_req) <= kRegimeTol;
    r.checks.push_back(
        {Regime::WeakCriticalDimension, rho_ok && std::abs(rho - rho_req) <= kRegimeTol && theta_ok, d.str()});
  }

  if (n >= 1 && n <= 3) {
    r.checks.push_back({Regime::RegularRhoOne, std::abs(rho - 1.0) <= kRegimeTol, "rho = 1, n <= 3"});
  }
  if (n == 1 || n == 2) {
    r.checks.push_back({Regime::RegularLowDimension, rho_ok && rho > 1.0 + kRegimeTol, "rho > 1, n <= 2"});
  }
  return r;
}

}  // namespace kgwell
