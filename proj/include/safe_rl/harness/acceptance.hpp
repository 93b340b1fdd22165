#pragma once

#include <string>
#include <vector>

namespace safe_rl::harness {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string observed;
  std::string expected;
  double seconds = 0.0;
  std::vector<std::string> notes;  // report-only findings that do not gate the result
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

struct AcceptanceOptions {
  std::vector<int> only;                      // empty runs all criteria
  std::string output_dir = "acceptance_runs";  // traces of the experiment criteria
  int gather_iterations = 300;
  int gather_seeds = 3;
};

inline constexpr int kCriterionCount = 8;

CriterionResult run_criterion(int id, const AcceptanceOptions& options);
AcceptanceReport run_acceptance(const AcceptanceOptions& options);

// "PASS <id> <name>: observed ...; expected ..." (or FAIL).
std::string format_line(const CriterionResult& r);

std::string report_to_json(const AcceptanceReport& report, int indent = 2);
AcceptanceReport report_from_json(const std::string& text);

}  // namespace safe_rl::harness
