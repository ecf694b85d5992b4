#pragma once

// Batch front end: tmep <simulate|verify|scan|scaling|emit-fixtures>.

#include "tmep/config.hpp"
#include "tmep/verify.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace tmep {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitResource = 3 };

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

int run_simulate(const CliOptions& opt, std::ostream& log);
int run_verify(const CliOptions& opt, std::ostream& log);
int run_scan(const CliOptions& opt, std::ostream& log);
int run_scaling(const CliOptions& opt, std::ostream& log);
/// Writes fix-a.json, fix-d.json and their expected-output manifests.
int emit_fixtures(const std::string& out_dir, int jobs, std::ostream& log);

/// Parses argv and dispatches; maps errors onto the exit code contract.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Fingerprint of a config, ignoring its output directory.
std::string config_fingerprint(const ExperimentConfig& c);

/// Verify reports for every time of the config, in (time, check) order.
std::vector<CheckReport> verify_reports(const ExperimentConfig& c, const Model& model, int jobs);

}  // namespace tmep
