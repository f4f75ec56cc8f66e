#include "kgwell/diagnostics.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kgwell {

namespace {

constexpr double kAbsSlack = 1e-12;
constexpr double kRelFloor = 1e-12;

double quad(const SparseMatrix& m, const Vector& x) { return x.dot(m * x); }

}  // namespace

EnergySample energy(const SimState& state, const DiscreteOperators& operators, const CouplingEvaluator& coupling) {
  EnergySample e = energy(state, operators);
  e.coupling = coupling.energy(state.u, state.v);
  e.E = e.kinetic + e.potential + e.coupling;
  e.E_eps = e.E;
  return e;
}

EnergySample energy(const SimState& state, const DiscreteOperators& operators) {
  state.validate(operators.size());
  EnergySample e;
  e.t = state.t;
  const double du2 = quad(operators.M, state.du);
  const double dv2 = quad(operators.M, state.dv);
  const double u2 = quad(operators.K, state.u);
  const double v2 = quad(operators.K, state.v);
  e.kinetic = 0.5 * (du2 + dv2);
  e.potential = 0.5 * (u2 + v2);
  e.E = e.kinetic + e.potential;
  e.E_eps = e.E;
  e.norm_u_V = std::sqrt(std::max(0.0, u2));
  e.norm_v_V = std::sqrt(std::max(0.0, v2));
  e.norm_du_L2 = std::sqrt(std::max(0.0, du2));
  e.norm_dv_L2 = std::sqrt(std::max(0.0, dv2));
  e.gamma1_flux_u = quad(operators.B, state.du);
  e.gamma1_flux_v = quad(operators.B, state.dv);
  return e;
}

double multiplier_functional(const SimState& state, const DiscreteOperators& operators, int n) {
  const double nm1 = static_cast<double>(n - 1);
  return 2.0 * state.du.dot(operators.G * state.u) + nm1 * state.du.dot(operators.M * state.u) +
         2.0 * state.dv.dot(operators.G * state.v) + nm1 * state.dv.dot(operators.M * state.v);
}

PerturbedEnergy perturbed_energy(const SimState& state, const DiscreteOperators& operators,
                                 const CouplingEvaluator& coupling, double eps, int n) {
  const double psi = multiplier_functional(state, operators, n);
  const double E = energy(state, operators, coupling).E;
  return {psi, E + eps * psi};
}

EnergySample full_sample(const SimState& state, const DiscreteOperators& operators,
                         const CouplingEvaluator* coupling, const WellConstants& constants) {
  EnergySample e = coupling != nullptr ? energy(state, operators, *coupling) : energy(state, operators);
  e.psi = multiplier_functional(state, operators, constants.n);
  e.E_eps = e.E + constants.eps1() * e.psi;
  e.well_margin_u = constants.lambda_star - e.norm_u_V;
  e.well_margin_v = constants.lambda_star - e.norm_v_V;
  return e;
}

EquivalenceReport check_equivalence(const Trajectory& trajectory, const WellConstants& constants) {
  EquivalenceReport r;
  r.eps = constants.eps1();
  double worst = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& s = trajectory.energy(i);
    const double e_eps = s.E + r.eps * s.psi;
    const bool ok = 0.5 * s.E <= e_eps + kAbsSlack && e_eps <= 1.5 * s.E + kAbsSlack;
    if (s.E > kAbsSlack) {
      const double ratio = e_eps / s.E;
      r.min_ratio = std::min(r.min_ratio, ratio);
      r.max_ratio = std::max(r.max_ratio, ratio);
    }
    const double dev = std::max(0.5 * s.E - e_eps, e_eps - 1.5 * s.E);
    if (!ok && dev > worst) {
      worst = dev;
      r.worst_sample = i;
    }
    r.satisfied = r.satisfied && ok;
  }
  return r;
}

DissipationReport check_dissipation(const Trajectory& trajectory, double m0, double slack) {
  DissipationReport r;
  r.slack = slack;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
    const auto& a = trajectory.energy(i);
    const auto& b = trajectory.energy(i + 1);
    const double span = b.t - a.t;
    if (!(span > 0.0)) throw InvalidInput("trajectory times must be strictly increasing");
    if (span > 0.1 + 1e-12) throw InvalidInput("sample spacing exceeds 0.1; reduce the stride");
    const double dE = (b.E - a.E) / span;
    const double trace_rate = (b.trace_dissipated - a.trace_dissipated) / span;
    const double flux_rate = (b.dissipated - a.dissipated) / span;
    const double excess = dE + m0 * trace_rate;
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.worst_interval = i;
    }
    r.worst_identity_residual = std::max(r.worst_identity_residual, std::abs(dE + flux_rate));
    const double sampled_flux =
        0.5 * (a.gamma1_flux_u + a.gamma1_flux_v + b.gamma1_flux_u + b.gamma1_flux_v);
    r.worst_flux_residual = std::max(r.worst_flux_residual, std::abs(dE + sampled_flux));
  }
  if (trajectory.size() < 2) r.worst_excess = 0.0;
  r.satisfied = r.worst_excess <= slack;
  return r;
}

DecayReport check_decay_bound(const Trajectory& trajectory, const WellConstants& constants, double tolerance) {
  DecayReport r;
  r.tau = constants.tau;
  r.tolerance = tolerance;
  if (trajectory.empty()) return r;
  r.E0 = trajectory.energy(0).E;
  if (r.E0 < 0.0) throw InvalidInput("initial energy is negative");
  const double floor = kRelFloor * r.E0;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& s = trajectory.energy(i);
    const double bound = 3.0 * r.E0 * std::exp(-r.tau * s.t / 3.0);
    if (s.E > floor && s.E > 0.0) {
      r.max_violation_ratio = std::max(r.max_violation_ratio, s.E / bound);
      if (s.E > tolerance * bound) r.bound_satisfied = false;
      const double y = std::log(s.E);
      sx += s.t;
      sy += y;
      sxx += s.t * s.t;
      sxy += s.t * y;
      ++r.fitted_points;
    } else if (s.E > tolerance * bound + kAbsSlack) {
      r.bound_satisfied = false;
    }
  }
  if (r.fitted_points >= 2) {
    const double k = static_cast<double>(r.fitted_points);
    const double den = k * sxx - sx * sx;
    if (den > 0.0) r.fitted_rate = -(k * sxy - sx * sy) / den;
  }
  r.equivalence_satisfied = check_equivalence(trajectory, constants).satisfied;
  return r;
}

WellMonitor well_monitor(const Trajectory& trajectory, double threshold) {
  if (trajectory.empty()) throw InvalidInput("well monitor needs a non-empty trajectory");
  WellMonitor w;
  w.threshold = threshold;
  for (const auto& s : trajectory.samples) {
    w.max_norm_u = std::max(w.max_norm_u, s.energy.norm_u_V);
    w.max_norm_v = std::max(w.max_norm_v, s.energy.norm_v_V);
  }
  w.invariant_held = w.max_norm_u < threshold && w.max_norm_v < threshold;
  return w;
}

WellMonitor well_monitor(const Trajectory& trajectory, const WellConstants& constants) {
  return well_monitor(trajectory, constants.lambda_star);
}

WellPropertyReport check_well_properties(const Trajectory& trajectory, const WellConstants& constants) {
  WellPropertyReport r;
  r.min_A = std::numeric_limits<double>::infinity();
  for (const auto& sample : trajectory.samples) {
    const auto& s = sample.energy;
    const double u2 = s.norm_u_V * s.norm_u_V;
    const double v2 = s.norm_v_V * s.norm_v_V;
    const double scale = std::max(std::abs(s.E), 1.0) * 1e-12;
    const double psi_cap = constants.P * s.E;
    if (std::abs(s.psi) > psi_cap + kAbsSlack) r.psi_bounded = false;
    if (s.E > kAbsSlack) r.worst_psi_ratio = std::max(r.worst_psi_ratio, std::abs(s.psi) / psi_cap);
    const double A = 0.25 * (u2 + v2) + s.coupling;
    r.min_A = std::min(r.min_A, A);
    if (A < -kAbsSlack) r.A_nonnegative = false;
    if (0.25 * u2 - constants.N1 * u2 * u2 < -kAbsSlack || 0.25 * v2 - constants.N1 * v2 * v2 < -kAbsSlack) {
      r.J_nonnegative = false;
    }
    const double lower = 0.5 * s.kinetic + 0.5 * s.potential;
    if (s.E < lower - scale) r.E_lower_bound = false;
  }
  if (trajectory.empty()) r.min_A = 0.0;
  return r;
}

double energy_drift(const Trajectory& trajectory) {
  if (trajectory.empty()) return 0.0;
  const double e0 = trajectory.energy(0).E;
  double drift = 0.0;
  for (const auto& s : trajectory.samples) drift = std::max(drift, std::abs(s.energy.E + s.energy.dissipated - e0));
  return drift;
}

}  // namespace kgwell
