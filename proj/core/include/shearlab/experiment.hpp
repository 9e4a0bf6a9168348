#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "shearlab/config.hpp"

namespace shearlab {

enum ExitCode : int {
  kExitPass = 0,
  kExitComputation = 1,
  kExitConfig = 2,
  kExitTolerance = 3,
};

struct RunOptions {
  bool write_files = true;
  std::ostream* log = nullptr;  ///< progress lines, one per grid point
};

/// What a run produced. The same content is written to output_dir when
/// RunOptions::write_files is set: every CSV, summary.json and manifest.json.
struct ExperimentOutcome {
  int exit_code = kExitPass;
  std::string summary_json;
  std::string manifest_json;
  std::map<std::string, std::string> csv;  ///< file name -> contents
  std::string error;
};

/// FNV-1a hash of the canonical config text.
[[nodiscard]] std::uint64_t config_hash(const ExperimentConfig& config);

/// Validates the config and runs its engine. Never throws for config or
/// computation problems; they are reported through the exit code and a
/// failure record in the manifest, which is written in every case.
///
/// CSV bodies depend only on the config (including the seed), not on the
/// number of workers.
[[nodiscard]] ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                               const RunOptions& options = {});

}  // namespace shearlab
