#include "kgwell/report.hpp"

#include "kgwell/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace kgwell {

namespace {

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::string set_name(WellSet s) { return s == WellSet::General ? "general" : "rho_one"; }

}  // namespace

CheckSelection CheckSelection::parse(const std::string& list) {
  CheckSelection c{false, false, false, false};
  std::string text = list;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    if (item == "well") {
      c.well = true;
    } else if (item == "equivalence") {
      c.equivalence = true;
    } else if (item == "dissipation") {
      c.dissipation = true;
    } else if (item == "bound") {
      c.bound = true;
    } else if (item == "all") {
      c = CheckSelection{};
    } else if (item != "none") {
      throw ConfigError("unknown check '" + item + "' (expected well, equivalence, dissipation, bound)");
    }
  }
  return c;
}

std::string CheckSelection::to_string() const {
  std::string s;
  const auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ',';
    s += name;
  };
  add(well, "well");
  add(equivalence, "equivalence");
  add(dissipation, "dissipation");
  add(bound, "bound");
  return s.empty() ? "none" : s;
}

bool Verification::passed() const {
  return (!enabled.well || well.invariant_held) && (!enabled.equivalence || equivalence.satisfied) &&
         (!enabled.dissipation || dissipation.satisfied) && (!enabled.bound || decay.bound_satisfied);
}

Verification verify(const SimulationResult& result, const ScenarioConfig& config, CheckSelection checks) {
  Verification v;
  v.enabled = checks;
  const auto& traj = result.trajectory;
  const auto& constants = result.constants.well;
  v.well = well_monitor(traj, constants);
  v.equivalence = check_equivalence(traj, constants);
  const double e0 = traj.empty() ? 0.0 : traj.energy(0).E;
  v.dissipation = check_dissipation(traj, constants.m0, config.dissipation_slack_factor * result.dt * std::abs(e0));
  v.decay = check_decay_bound(traj, constants, config.bound_tolerance);
  v.properties = check_well_properties(traj, constants);
  v.energy_drift = energy_drift(traj);
  return v;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t,E,E_eps,norm_u_V,norm_v_V,norm_du_L2,norm_dv_L2,coupling_energy,gamma1_flux_u,gamma1_flux_v,well_margin\n";
  os << std::setprecision(17);
  for (const auto& sample : trajectory.samples) {
    const auto& e = sample.energy;
    os << e.t << ',' << e.E << ',' << e.E_eps << ',' << e.norm_u_V << ',' << e.norm_v_V << ',' << e.norm_du_L2
       << ',' << e.norm_dv_L2 << ',' << e.coupling << ',' << e.gamma1_flux_u << ',' << e.gamma1_flux_v << ','
       << std::min(e.well_margin_u, e.well_margin_v) << '\n';
  }
}

void write_constants_table(std::ostream& os, const ConstantsBundle& b, const BoundaryPartition& partition) {
  const auto& w = b.well;
  struct Row {
    const char* name;
    double value;
    const char* formula;
  };
  const Row rows[] = {
      {"rho", w.rho, "coupling exponent"},
      {"n", static_cast<double>(w.n), "space dimension"},
      {"R", w.R, "max |x - x0| over the mesh"},
      {"m0", w.m0, "min m.nu over Gamma1"},
      {"lambda1", w.lambda1, "first eigenvalue of ((u,v)) = lambda (u,v)"},
      {"c0_raw", b.c0_raw, "discrete best |v|_{L^{2(rho+1)}} <= c0 |v|"},
      {"c1_raw", b.c1_raw, "discrete best |v|_{L^4} <= c1 |v|"},
      {"c2_raw", b.c2_raw, "discrete best |w|_{L^4(Gamma1)} <= c2 |w|"},
      {"c3_raw", b.c3_raw, "discrete best |w|_{L^2(Gamma1)} <= c3 |w|"},
      {"safety_factor", b.safety_factor, "applied to c0..c3"},
      {"c0", w.c0, "safety_factor * c0_raw"},
      {"c1", w.c1, "safety_factor * c1_raw"},
      {"c2", w.c2, "safety_factor * c2_raw"},
      {"c3", w.c3, "safety_factor * c3_raw"},
      {"N", w.N, "c0^(2(rho+1)) / (2(rho+1))"},
      {"lambda_star", w.lambda_star, "(1/(4N))^(1/(2 rho))"},
      {"N1", w.N1, "(c1^4/2)(n + 1/4) + R c2^4/2 + c1^4 (n-1)"},
      {"lambda1_star", w.lambda1_star, "(1/(4 N1))^(1/2)"},
      {"P", w.P, "4(2R + (n-1)/2 + (n-1)/(2 lambda1))"},
      {"D", w.D, "R^3 + R + R^2 (n-1)^2 c3^2"},
      {"tau", w.tau, "min{1/(2P), m0/D}"},
      {"eps1", w.eps1(), "1/(2P)"},
  };
  os << std::left << std::setw(15) << "name" << std::setw(24) << "value" << "formula\n";
  os << std::string(80, '-') << '\n';
  for (const auto& r : rows) {
    std::ostringstream v;
    v << std::setprecision(10) << r.value;
    os << std::left << std::setw(15) << r.name << std::setw(24) << v.str() << r.formula << '\n';
  }
  for (const auto& warning : partition.warnings) os << "warning: " << warning << '\n';
  os << '\n' << std::setprecision(17);
  for (const auto& r : rows) os << r.name << '=' << r.value << '\n';
  os << "gamma0_facets=" << partition.gamma0_count() << '\n';
  os << "gamma1_facets=" << partition.gamma1_count() << '\n';
}

void write_validation(std::ostream& os, const ValidationReport& r) {
  os << std::setprecision(17);
  os << "rho=" << r.rho << '\n' << "n=" << r.n << '\n';
  if (r.theta) os << "theta=" << *r.theta << '\n';
  for (const auto& c : r.checks) {
    os << "regime." << to_string(c.regime) << '=' << yes_no(c.satisfied) << "  # " << c.detail << '\n';
  }
  os << "valid=" << yes_no(r.valid()) << '\n';
  os << "decay_applicable=" << yes_no(r.decay_applicable()) << '\n';
}

void write_report(std::ostream& os, const SimulationResult& result, const ScenarioConfig& config,
                  const Verification& v) {
  const auto& w = result.constants.well;
  const auto& a = result.admissibility;
  os << std::setprecision(10);
  os << "== " << config.name << " ==\n";
  os << "well constants (general):  N = " << w.N << ", lambda* = " << w.lambda_star << '\n';
  os << "well constants (rho = 1):  N1 = " << w.N1 << ", lambda1* = " << w.lambda1_star << ", P = " << w.P
     << ", D = " << w.D << ", tau = " << w.tau << '\n';
  os << "admissibility (" << set_name(a.set) << "): L = " << a.L << " vs lambda*^2/4 = "
     << 0.25 * a.threshold * a.threshold << " -> " << (a.admissible ? "admissible" : "NOT admissible") << '\n';
  os << "well monitor:   max |u| = " << v.well.max_norm_u << ", max |v| = " << v.well.max_norm_v
     << " (threshold " << v.well.threshold << ") -> " << (v.well.invariant_held ? "held" : "VIOLATED") << '\n';
  os << "equivalence:    E_eps/E in [" << v.equivalence.min_ratio << ", " << v.equivalence.max_ratio
     << "] with eps1 = " << v.equivalence.eps << " -> " << (v.equivalence.satisfied ? "ok" : "FAILED") << '\n';
  os << "dissipation:    worst E' + m0 trace = " << v.dissipation.worst_excess << " (slack " << v.dissipation.slack
     << "), identity residual " << v.dissipation.worst_identity_residual << ", flux residual " << v.dissipation.worst_flux_residual << " -> "
     << (v.dissipation.satisfied ? "ok" : "FAILED") << '\n';
  os << "decay bound:    E0 = " << v.decay.E0 << ", max E/(3E0 exp(-tau t/3)) = " << v.decay.max_violation_ratio
     << " -> " << (v.decay.bound_satisfied ? "ok" : "FAILED") << '\n';
  os << "fitted rate:    " << v.decay.fitted_rate << " vs tau/3 = " << w.tau / 3.0
     << (v.decay.fitted_rate >= w.tau / 3.0 ? "" : "  (slower than the theoretical rate)") << '\n';
  os << "checks enabled: " << v.enabled.to_string() << " -> " << (v.passed() ? "PASS" : "FAIL") << "\n\n";

  os << std::setprecision(17);
  os << "dt=" << result.dt << '\n';
  os << "samples=" << result.trajectory.size() << '\n';
  os << "N=" << w.N << "\nlambda_star=" << w.lambda_star << "\nN1=" << w.N1 << "\nlambda1_star=" << w.lambda1_star
     << "\nP=" << w.P << "\nD=" << w.D << "\ntau=" << w.tau << "\nm0=" << w.m0 << "\nR=" << w.R << '\n';
  os << "admissibility_set=" << set_name(a.set) << "\nL=" << a.L << "\nadmissible=" << yes_no(a.admissible)
     << "\nnorms_below_lambda_star=" << yes_no(a.norms_below_lambda_star)
     << "\nL_below_quarter_lambda_star_sq=" << yes_no(a.L_below_quarter_lambda_star_sq)
     << "\nL1=" << result.admissibility_rho1.L << "\nadmissible_rho_one=" << yes_no(result.admissibility_rho1.admissible)
     << '\n';
  os << "initial_boundary_mismatch=" << result.initial.boundary_mismatch
     << "\ninitial_compatibility_residual=" << result.initial.compatibility_residual << '\n';
  os << "max_norm_u=" << v.well.max_norm_u << "\nmax_norm_v=" << v.well.max_norm_v
     << "\ninvariant_held=" << yes_no(v.well.invariant_held) << '\n';
  os << "equivalence_satisfied=" << yes_no(v.equivalence.satisfied) << "\nequivalence_min_ratio=" << v.equivalence.min_ratio
     << "\nequivalence_max_ratio=" << v.equivalence.max_ratio << '\n';
  os << "dissipation_satisfied=" << yes_no(v.dissipation.satisfied) << "\ndissipation_worst_excess="
     << v.dissipation.worst_excess << "\ndissipation_slack=" << v.dissipation.slack
     << "\ndissipation_identity_residual=" << v.dissipation.worst_identity_residual << "\ndissipation_flux_residual=" << v.dissipation.worst_flux_residual << '\n';
  os << "E0=" << v.decay.E0 << "\nfitted_rate=" << v.decay.fitted_rate << "\nbound_satisfied="
     << yes_no(v.decay.bound_satisfied) << "\nmax_violation_ratio=" << v.decay.max_violation_ratio << '\n';
  os << "psi_bounded=" << yes_no(v.properties.psi_bounded) << "\nA_nonnegative=" << yes_no(v.properties.A_nonnegative)
     << "\nJ_nonnegative=" << yes_no(v.properties.J_nonnegative)
     << "\nE_lower_bound=" << yes_no(v.properties.E_lower_bound) << '\n';
  os << "energy_drift=" << v.energy_drift << '\n';
  os << "checks=" << v.enabled.to_string() << "\npassed=" << yes_no(v.passed()) << '\n';
}

void write_decay_svg(std::ostream& os, const Trajectory& trajectory, const WellConstants& constants) {
  constexpr double width = 640, height = 400, margin = 50;
  if (trajectory.empty()) throw InvalidInput("cannot plot an empty trajectory");
  const double e0 = trajectory.energy(0).E;
  const double t_max = std::max(trajectory.samples.back().energy.t, 1e-300);
  const double floor = e0 > 0 ? e0 * 1e-16 : 1e-300;
  const auto log_e = [&](double e) { return std::log10(std::max(e, floor)); };

  double y_lo = log_e(floor), y_hi = log_e(3.0 * std::max(e0, floor));
  for (const auto& s : trajectory.samples) y_lo = std::min(y_lo, log_e(s.energy.E));
  if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
  const auto px = [&](double t) { return margin + (width - 2 * margin) * t / t_max; };
  const auto py = [&](double y) { return height - margin - (height - 2 * margin) * (y - y_lo) / (y_hi - y_lo); };

  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
     << height - margin << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
     << "\" stroke=\"black\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const auto& s : trajectory.samples) os << px(s.energy.t) << ',' << py(log_e(s.energy.E)) << ' ';
  os << "\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"firebrick\" stroke-dasharray=\"6,4\" points=\"";
  for (int i = 0; i <= 100; ++i) {
    const double t = t_max * i / 100.0;
    os << px(t) << ',' << py(log_e(3.0 * e0 * std::exp(-constants.tau * t / 3.0))) << ' ';
  }
  os << "\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"" << margin - 15 << "\" font-size=\"13\">log10 E(t) (solid) vs 3 E(0) exp(-tau t/3) (dashed), tau = "
     << constants.tau << "</text>\n";
  os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 20 << "\" font-size=\"12\" text-anchor=\"end\">t = "
     << t_max << "</text>\n";
  os << "<text x=\"" << 5 << "\" y=\"" << margin << "\" font-size=\"12\">" << y_hi << "</text>\n";
  os << "<text x=\"" << 5 << "\" y=\"" << height - margin << "\" font-size=\"12\">" << y_lo << "</text>\n";
  os << "</svg>\n";
}

}  // namespace kgwell
