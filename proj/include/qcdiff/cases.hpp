#pragma once

// Verification runs driven by JSON configs: each command builds its objects,
// runs the engines, evaluates named checks against the configured tolerances
// and optionally writes a report plus CSV artifacts.

#include "qcdiff/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qcdiff {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct CaseResult {
  std::string command;
  std::vector<Check> checks;
  json report;
  bool pass() const;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  ///< artifacts are written only when set
  std::filesystem::path config_dir;              ///< base for relative file references
  int max_n = 0;                                 ///< > 0 truncates van Hove sequences
  std::optional<std::uint64_t> seed;             ///< overrides the config seed
  std::string case_name;                         ///< label for the report, defaults to the command
};

const std::vector<std::string>& command_names();

/// Dispatches to the named command. ConfigError for unusable configs (before
/// any artifact is written); engine failures propagate as qcdiff::Error.
CaseResult run_command(const std::string& command, const json& config, const RunOptions& opt);

CaseResult run_bupu_check(const json& config, const RunOptions& opt);
CaseResult run_norms(const json& config, const RunOptions& opt);
CaseResult run_s0_isometry(const json& config, const RunOptions& opt);
CaseResult run_psf(const json& config, const RunOptions& opt);
CaseResult run_density(const json& config, const RunOptions& opt);
CaseResult run_fourier_bohr(const json& config, const RunOptions& opt);
CaseResult run_autocorr(const json& config, const RunOptions& opt);
CaseResult run_diffract(const json& config, const RunOptions& opt);
CaseResult run_wiener_diagram(const json& config, const RunOptions& opt);

}  // namespace qcdiff
