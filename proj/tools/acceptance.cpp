#include <CLI11.hpp>

#include "acceptance_main.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
  safe_rl::harness::AcceptanceOptions options;
  std::string report;
  app.add_option("--only", options.only, "criterion ids to run (default: all)");
  app.add_option("--out", options.output_dir, "directory for experiment traces");
  app.add_option("--report", report, "write the JSON report here");
  app.add_option("--gather-iterations", options.gather_iterations, "iterations per Point-Gather run");
  app.add_option("--gather-seeds", options.gather_seeds, "seeds per algorithm on Point-Gather");
  CLI11_PARSE(app, argc, argv);
  try {
    return safe_rl::tools::run_acceptance_cli(options, report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
