#pragma once

#include "kgwell/assembly.hpp"
#include "kgwell/constants.hpp"
#include "kgwell/dynamics.hpp"

#include <vector>

namespace kgwell {

/// Energy breakdown of one state.
struct EnergySample {
  double t = 0.0;
  double kinetic = 0.0;    // (|u'|^2 + |v'|^2) / 2
  double potential = 0.0;  // (|u|_V^2 + |v|_V^2) / 2
  double coupling = 0.0;   // (1/(rho+1)) int (|u|^rho u)(|v|^rho v)
  double E = 0.0;
  double psi = 0.0;
  double E_eps = 0.0;
  double norm_u_V = 0.0, norm_v_V = 0.0;
  double norm_du_L2 = 0.0, norm_dv_L2 = 0.0;
  double well_margin_u = 0.0, well_margin_v = 0.0;  // lambda* - |u|_V
  double gamma1_flux_u = 0.0, gamma1_flux_v = 0.0;  // u'.B u', v'.B v'
  /// Discrete energy removed through Gamma1 since t = 0 (sum of step dissipations).
  double dissipated = 0.0;
  /// Time integral of |u'|^2 + |v'|^2 over Gamma1 since t = 0 (midpoint rule).
  double trace_dissipated = 0.0;
};

struct TrajectorySample {
  SimState state;
  EnergySample energy;
};

/// Samples with strictly increasing times, the first at t = 0.
struct Trajectory {
  std::vector<TrajectorySample> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  const EnergySample& energy(std::size_t i) const { return samples[i].energy; }
};

/// Kinetic, potential and coupling parts; psi and E_eps are left at zero
/// and E_eps = E.
EnergySample energy(const SimState& state, const DiscreteOperators& operators, const CouplingEvaluator& coupling);
/// Linear energy only (coupling switched off).
EnergySample energy(const SimState& state, const DiscreteOperators& operators);

/// psi = 2 u'.(G u) + (n-1) u'.(M u) + (same for v).
double multiplier_functional(const SimState& state, const DiscreteOperators& operators, int n);

struct PerturbedEnergy {
  double psi;
  double E_eps;
};

PerturbedEnergy perturbed_energy(const SimState& state, const DiscreteOperators& operators,
                                 const CouplingEvaluator& coupling, double eps, int n);

/// Full sample: energy parts, psi and E_eps (eps = constants.eps1()), norms,
/// well margins against constants.lambda_star and Gamma1 fluxes. A null
/// `coupling` means the coupling is switched off.
EnergySample full_sample(const SimState& state, const DiscreteOperators& operators,
                         const CouplingEvaluator* coupling, const WellConstants& constants);

struct EquivalenceReport {
  bool satisfied = true;
  double eps = 0.0;
  double min_ratio = 1.0;  // min over samples of E_eps / E (samples with E above the floor)
  double max_ratio = 1.0;
  std::size_t worst_sample = 0;
};

/// E/2 <= E + eps1 psi <= 3E/2 at every sample, with absolute slack 1e-12.
/// Uses the psi stored in each sample with eps1 = 1/(2P).
EquivalenceReport check_equivalence(const Trajectory& trajectory, const WellConstants& constants);

struct DissipationReport {
  bool satisfied = true;
  double slack = 0.0;
  /// max over intervals of E' + m0 * (Gamma1 trace rate); must stay <= slack.
  double worst_excess = 0.0;
  /// max over intervals of |E' + dissipation rate| (discrete energy identity).
  double worst_identity_residual = 0.0;
  /// max over intervals of |E' + trapezoid average of the sampled Gamma1 flux|.
  double worst_flux_residual = 0.0;
  std::size_t worst_interval = 0;
};

/// Finite-difference check of E' <= -m0 (|u'|^2_{L2(Gamma1)} + |v'|^2_{L2(Gamma1)}).
/// Throws InvalidInput if consecutive samples are more than 0.1 apart.
DissipationReport check_dissipation(const Trajectory& trajectory, double m0, double slack);

struct DecayReport {
  double E0 = 0.0;
  double tau = 0.0;
  double fitted_rate = 0.0;  // -slope of the least-squares fit of log E(t)
  std::size_t fitted_points = 0;
  bool bound_satisfied = true;
  double max_violation_ratio = 0.0;  // max E(t) / (3 E(0) exp(-tau t / 3))
  bool equivalence_satisfied = true;
  double tolerance = 1.0;
};

/// E(t) <= tolerance * 3 E(0) exp(-tau t / 3) at every sample. Below
/// 1e-12 E(0) the comparison uses an absolute slack of 1e-12.
DecayReport check_decay_bound(const Trajectory& trajectory, const WellConstants& constants,
                              double tolerance = 1.0);

struct WellMonitor {
  double max_norm_u = 0.0;
  double max_norm_v = 0.0;
  double threshold = 0.0;
  bool invariant_held = true;
};

/// max_t |u(t)|_V, |v(t)|_V against threshold (lambda* by default).
WellMonitor well_monitor(const Trajectory& trajectory, double threshold);
WellMonitor well_monitor(const Trajectory& trajectory, const WellConstants& constants);

/// Intermediate inequalities of the decay argument, checked samplewise.
struct WellPropertyReport {
  bool psi_bounded = true;      // |psi| <= P E
  bool A_nonnegative = true;    // (|u|^2 + |v|^2)/4 + coupling >= 0
  bool J_nonnegative = true;    // |u|^2/4 - N1 |u|^4 >= 0, same for v
  bool E_lower_bound = true;    // E >= (|u'|^2+|v'|^2)/4 + (|u|^2+|v|^2)/4
  double worst_psi_ratio = 0.0;  // max |psi| / (P E)
  double min_A = 0.0;

  bool all() const { return psi_bounded && A_nonnegative && J_nonnegative && E_lower_bound; }
};

WellPropertyReport check_well_properties(const Trajectory& trajectory, const WellConstants& constants);

/// max_i |E_i + dissipated_i - E_0|: drift of the discrete energy identity.
double energy_drift(const Trajectory& trajectory);

}  // namespace kgwell
