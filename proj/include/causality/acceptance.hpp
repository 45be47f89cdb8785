#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace causality {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  /// Working directory for the kill/resume run.
  std::string work_dir = ".";
  /// Planned length of the interrupted 4-event run, and when it is killed.
  double resume_run_seconds = 30;
  double kill_after_seconds = 10;
  std::uint64_t seed = 20240229;
  /// Criterion ids to run; empty means all.
  std::vector<int> only;
};

/// Runs the acceptance criteria, printing one PASS/FAIL line each to `out`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace causality
