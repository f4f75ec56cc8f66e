#include "cli/commands.hpp"

#include "kgwell/error.hpp"
#include "kgwell/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace kgwell::cli {

namespace fs = std::filesystem;

namespace {

int dimension_of(const KeyValueConfig& cfg) {
  if (cfg.has("model.n")) return static_cast<int>(cfg.get_int("model.n", 1));
  const std::string kind = cfg.require("mesh.kind");
  if (kind == "rectangle") return 2;
  if (kind == "file") return static_cast<int>(cfg.get_int("mesh.dimension", 0));
  return 1;
}

std::optional<double> theta_of(const KeyValueConfig& cfg) {
  if (!cfg.has("model.theta")) return std::nullopt;
  return cfg.require_double("model.theta");
}

/// Runs `body`, mapping library exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const NonlinearSolveFailure& e) {
    err << "solver failure at t = " << e.time() << ": " << e.what() << '\n';
    return kSolverFailure;
  } catch (const Error& e) {
    err << "numerical setup failure: " << e.what() << '\n';
    return kSetupFailure;
  }
}

/// Record of one run directory: written before integration, finalized after.
class RunManifest {
 public:
  RunManifest(fs::path dir, const KeyValueConfig& config) : dir_(std::move(dir)), config_(config) {}

  void set_snapshot(const SimulationResult& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& w = r.constants.well;
    os << "constants.lambda1=" << w.lambda1 << "\nconstants.N=" << w.N << "\nconstants.lambda_star=" << w.lambda_star
       << "\nconstants.N1=" << w.N1 << "\nconstants.lambda1_star=" << w.lambda1_star << "\nconstants.P=" << w.P
       << "\nconstants.D=" << w.D << "\nconstants.tau=" << w.tau << "\nconstants.m0=" << w.m0
       << "\nconstants.R=" << w.R << "\nadmissibility.L=" << r.admissibility.L
       << "\nadmissibility.admissible=" << (r.admissibility.admissible ? "true" : "false") << "\ndt=" << r.dt << '\n';
    snapshot_ = os.str();
  }
  void add_output(const std::string& name) { outputs_.push_back(name); }

  void write(const std::string& status, int exit_code, const std::string& message = {}) const {
    std::ofstream os(dir_ / "manifest.txt");
    os << "scenario=" << config_.get_string("name", "scenario") << '\n';
    os << "status=" << status << '\n';
    os << "exit_code=" << exit_code << '\n';
    if (!message.empty()) os << "message=" << message << '\n';
    for (const auto& o : outputs_) os << "output=" << (dir_ / o).string() << '\n';
    os << snapshot_;
    os << "[config]\n";
    config_.write(os);
  }

 private:
  fs::path dir_;
  const KeyValueConfig& config_;
  std::string snapshot_;
  std::vector<std::string> outputs_;
};

struct RunOutcome {
  int code = kPass;
  double E0 = 0.0;
  double fitted_rate = 0.0;
  double energy_drift = 0.0;
  bool invariant_held = false;
  bool bound_satisfied = false;
};

RunOutcome run_one(const KeyValueConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  RunOutcome outcome;
  fs::create_directories(options.out_dir);
  RunManifest manifest(options.out_dir, config);
  manifest.write("configuring", kPass);

  ScenarioConfig scenario;
  SimulationResult result;
  outcome.code = guarded(err, [&] {
    scenario = scenario_from_config(config);
    result = prepare(scenario);
    if (options.checks.dissipation && result.dt * scenario.stride > 0.1 + 1e-12) {
      throw ConfigError("time.stride * dt exceeds 0.1; the dissipation check needs finer sampling");
    }
    return static_cast<int>(kPass);
  });
  if (outcome.code != kPass) {
    manifest.write("failed", outcome.code, "setup failed");
    return outcome;
  }
  manifest.set_snapshot(result);
  manifest.write("running", kPass);
  if (!result.admissibility.admissible) {
    err << "warning: initial data are not admissible (L = " << result.admissibility.L << ")\n";
  }

  outcome.code = guarded(err, [&] {
    run_integration(result, scenario);
    return static_cast<int>(kPass);
  });
  if (outcome.code != kPass) {
    manifest.write("failed", outcome.code, "integration failed");
    return outcome;
  }

  const Verification v = verify(result, scenario, options.checks);
  {
    std::ofstream csv(fs::path(options.out_dir) / "trajectory.csv");
    write_trajectory_csv(csv, result.trajectory);
    manifest.add_output("trajectory.csv");
  }
  {
    std::ofstream rep(fs::path(options.out_dir) / "report.txt");
    write_report(rep, result, scenario, v);
    manifest.add_output("report.txt");
  }
  if (options.plot) {
    std::ofstream svg(fs::path(options.out_dir) / "decay.svg");
    write_decay_svg(svg, result.trajectory, result.constants.well);
    manifest.add_output("decay.svg");
  }
  write_report(out, result, scenario, v);

  outcome.code = v.passed() ? kPass : kCheckFailure;
  outcome.E0 = v.decay.E0;
  outcome.fitted_rate = v.decay.fitted_rate;
  outcome.energy_drift = v.energy_drift;
  outcome.invariant_held = v.well.invariant_held;
  outcome.bound_satisfied = v.decay.bound_satisfied;
  manifest.add_output("manifest.txt");
  manifest.write(outcome.code == kPass ? "passed" : "checks_failed", outcome.code);
  return outcome;
}

}  // namespace

bool load_config(const std::string& path, KeyValueConfig& config, std::ostream& err) {
  try {
    config = KeyValueConfig::parse_file(path);
    return true;
  } catch (const Error& e) {
    err << "config error: " << e.what() << '\n';
    return false;
  }
}

int cmd_constants(const KeyValueConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const double rho = config.get_double("model.rho", 1.0);
    const ValidationReport hyp = validate_hypotheses(rho, dimension_of(config), theta_of(config));
    if (!(rho > 0.0)) {
      write_validation(err, hyp);
      throw ConfigError("model.rho must be positive (no existence regime applies)");
    }
    const ScenarioConfig scenario = scenario_from_config(config);
    const auto problem = build_problem(scenario);
    const ConstantsBundle constants = compute_constants(*problem, scenario.safety_factor);
    write_constants_table(out, constants, problem->partition);
    out << "hypotheses_valid=" << (hyp.valid() ? "true" : "false") << '\n';
    out << "decay_applicable=" << (hyp.decay_applicable() ? "true" : "false") << '\n';
    return static_cast<int>(kPass);
  });
}

int cmd_validate(const KeyValueConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ValidationReport r =
        validate_hypotheses(config.get_double("model.rho", 1.0), dimension_of(config), theta_of(config));
    write_validation(out, r);
    return static_cast<int>(r.valid() ? kPass : kCheckFailure);
  });
}

int cmd_run(const KeyValueConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  return run_one(config, options, out, err).code;
}

int cmd_sweep(const KeyValueConfig& config, const std::string& parameter, const std::vector<std::string>& values,
              const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (values.empty()) {
    err << "config error: sweep needs at least one value\n";
    return kConfigError;
  }
  if (parameter.empty()) {
    err << "config error: sweep needs a parameter name\n";
    return kConfigError;
  }
  for (const auto& v : values) {
    std::size_t used = 0;
    try {
      (void)std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size()) {
      err << "config error: sweep value '" << v << "' is not a number\n";
      return kConfigError;
    }
  }

  std::vector<std::future<std::pair<RunOutcome, std::string>>> jobs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    KeyValueConfig cfg = config;
    cfg.set(parameter, values[i]);
    cfg.set("name", config.get_string("name", "scenario") + "/" + parameter + "=" + values[i]);
    RunOptions opts = options;
    opts.out_dir = (fs::path(options.out_dir) / ("run_" + std::to_string(i))).string();
    jobs.push_back(std::async(std::launch::async, [cfg = std::move(cfg), opts] {
      std::ostringstream run_out, run_err;
      RunOutcome r = run_one(cfg, opts, run_out, run_err);
      return std::make_pair(r, run_err.str());
    }));
  }

  fs::create_directories(options.out_dir);
  std::ofstream summary(fs::path(options.out_dir) / "summary.csv");
  summary << "value,E0,fitted_rate,invariant_held,bound_satisfied,energy_drift,exit_code\n";
  summary << std::setprecision(17);
  int worst = kPass;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto [r, messages] = jobs[i].get();
    err << messages;
    summary << values[i] << ',' << r.E0 << ',' << r.fitted_rate << ',' << (r.invariant_held ? "true" : "false") << ','
            << (r.bound_satisfied ? "true" : "false") << ',' << r.energy_drift << ',' << r.code << '\n';
    out << parameter << '=' << values[i] << " exit=" << r.code << '\n';
    worst = std::max(worst, r.code);
  }
  return worst;
}

}  // namespace kgwell::cli
