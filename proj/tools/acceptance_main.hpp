#pragma once

#include <iostream>

#include "safe_rl/common/io.hpp"
#include "safe_rl/harness/acceptance.hpp"

namespace safe_rl::tools {

// Runs the suite, prints one line per criterion plus its notes, optionally
// writes the JSON report. Returns the process exit code.
inline int run_acceptance_cli(const harness::AcceptanceOptions& options, const std::string& report_path) {
  const harness::AcceptanceReport report = harness::run_acceptance(options);
  for (const harness::CriterionResult& c : report.criteria) {
    std::cout << harness::format_line(c) << "\n";
    for (const std::string& note : c.notes) std::cout << "    note: " << note << "\n";
  }
  if (!report_path.empty()) write_text_file(report_path, harness::report_to_json(report) + "\n");
  std::cout << (report.all_passed() ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
  return report.all_passed() ? 0 : 1;
}

}  // namespace safe_rl::tools
