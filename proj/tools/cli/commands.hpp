#pragma once

#include "kgwell/config.hpp"
#include "kgwell/report.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace kgwell::cli {

/// Process exit codes.
enum ExitCode : int {
  kPass = 0,
  kCheckFailure = 1,
  kConfigError = 2,
  kSetupFailure = 3,
  kSolverFailure = 4,
};

struct RunOptions {
  std::string out_dir = "kgwell_out";
  bool plot = true;
  CheckSelection checks;
};

int cmd_constants(const KeyValueConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const KeyValueConfig& config, std::ostream& out, std::ostream& err);

/// Writes manifest.txt (before integration, finalized after), trajectory.csv,
/// report.txt and decay.svg into options.out_dir.
int cmd_run(const KeyValueConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

/// One run per value of `parameter` in `<out_dir>/run_<i>/`, executed
/// concurrently, plus `<out_dir>/summary.csv`.
int cmd_sweep(const KeyValueConfig& config, const std::string& parameter, const std::vector<std::string>& values,
              const RunOptions& options, std::ostream& out, std::ostream& err);

/// Loads a config file; a load failure returns kConfigError through `code`.
bool load_config(const std::string& path, KeyValueConfig& config, std::ostream& err);

}  // namespace kgwell::cli
