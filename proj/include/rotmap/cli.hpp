#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rotmap::cli {

/// Exit codes of run().
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kAssertFailed = 4,
};

/// solve, scan-support, scan-gap, scan-bias, scan-tails, scan-map,
/// audit-monotonicity, audit-rescaling.
const std::vector<std::string>& command_names();

/// Everything a run depends on. Unset optionals take command-dependent
/// defaults (see README).
struct RunConfig {
  std::string command = "solve";
  std::string instance = "translation1d";
  /// Atoms per axis; unset means the mesh rule for scans and 64 otherwise.
  std::optional<int> n;
  double amplitude = 0.3;
  std::uint64_t seed = 0;
  /// 1 selects the entropic regulariser.
  double p = 2.0;
  double eps = 0.05;
  std::optional<double> eps_from;
  std::optional<double> eps_to;
  int points = 4;
  double tol = 1e-8;
  int max_iter = 20000;
  int threads = 1;
  std::string out = "out";
  bool assert_thresholds = false;
  int quadruples = 10000;
  double gamma = 4.0;
  double kappa = 1.0;
  double a_scale = 1.0;
  std::vector<double> shift = {0.3};
  std::optional<double> window_radius;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Canonical JSON text: fixed key order, "schema": 1, numbers with 17
/// significant digits, unset optionals as null.
std::string to_canonical_json(const RunConfig& cfg);

/// Parses a JSON document onto base. Rejects unknown keys, a schema other
/// than 1 and ill-typed values with InputError.
RunConfig apply_json(const std::string& text, RunConfig base = {});

/// Full command-line entry point. args excludes the program name. Outputs
/// go under cfg.out; diagnostics are one line on err of the form
///   error=<validation|nonconvergence|assert|internal> detail=<text>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rotmap::cli
