#pragma once

#include "kgwell/scenario.hpp"

#include <iosfwd>
#include <string>

namespace kgwell {

/// Which trajectory checks decide the pass/fail outcome of a run.
struct CheckSelection {
  bool well = true;
  bool equivalence = true;
  bool dissipation = true;
  bool bound = true;

  /// Comma-separated subset of `well,equivalence,dissipation,bound`.
  static CheckSelection parse(const std::string& list);
  std::string to_string() const;
};

struct Verification {
  CheckSelection enabled;
  WellMonitor well;
  EquivalenceReport equivalence;
  DissipationReport dissipation;
  DecayReport decay;
  WellPropertyReport properties;
  double energy_drift = 0.0;

  bool passed() const;
};

/// Runs every check on a finished simulation. The dissipation slack is
/// `config.dissipation_slack_factor * dt * E(0)`.
Verification verify(const SimulationResult& result, const ScenarioConfig& config, CheckSelection checks);

/// CSV with columns t, E, E_eps, norm_u_V, norm_v_V, norm_du_L2, norm_dv_L2,
/// coupling_energy, gamma1_flux_u, gamma1_flux_v, well_margin (17 significant digits).
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Human-readable table (name, value, formula) followed by `key=value` lines.
void write_constants_table(std::ostream& os, const ConstantsBundle& constants, const BoundaryPartition& partition);

void write_validation(std::ostream& os, const ValidationReport& report);

/// Summary block plus `key=value` machine lines.
void write_report(std::ostream& os, const SimulationResult& result, const ScenarioConfig& config,
                  const Verification& verification);

/// Polyline plot of log10 E(t) against the bound 3 E(0) exp(-tau t / 3).
void write_decay_svg(std::ostream& os, const Trajectory& trajectory, const WellConstants& constants);

}  // namespace kgwell
