#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zdpot/report.hpp"

namespace zdpot {

inline constexpr const char* kToolName = "zdpot";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

// Exit statuses of `run`.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// Parsed command line. Unset optionals fall back to per-subcommand defaults.
struct RunConfig {
  std::string command;       // kernel | bounds | exit | green | dirichlet | balayage | ehi | all | cache
  std::string cache_action;  // list | clear | verify
  int dim = 2;
  std::optional<int> r_min;
  std::optional<int> r_max;
  std::optional<int> n_max;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string cache_dir;
  unsigned threads = 0;
  std::string out;

  // Throws UsageError on d < 1, d > 3, tol <= 0, an empty radius range or an
  // unknown format.
  void validate() const;
  Json to_json() const;
};

struct AuditRun {
  std::vector<AuditReport> reports;
  std::map<std::string, double> seconds;  // wall-clock per audit id
  std::vector<std::pair<std::string, std::string>> skipped;  // (audit id, reason)

  bool pass() const;
  std::vector<std::string> failing() const;
};

// Runs every audit selected by cfg.command with its default grid.
AuditRun run_audits(const RunConfig& cfg);

// {"schema", "tool", "version", "config", "audits", "skipped", "pass",
// "failing"}. Wall-clock timings, the thread budget and output paths go under
// the separate top-level key "runtime" when requested, so the remaining body
// is reproducible bit for bit across runs and thread budgets.
Json report_envelope(const RunConfig& cfg, const AuditRun& run, bool with_timings = true);

// One row per (audit, constant) plus a pass row per audit.
std::string summary_csv(const AuditRun& run);

// Full front end: parses argv, runs, writes reports, returns the exit status.
// Reads ZDPOT_<FLAG> environment variables (e.g. ZDPOT_DIM, ZDPOT_THREADS) for
// any flag not given on the command line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zdpot
