#pragma once

#include <optional>
#include <string>
#include <vector>

namespace safe_rl::harness {

inline constexpr const char* kMetricsSchema = "metrics/1";
inline constexpr const char* kTracesSchema = "traces/1";

// One row per training iteration; the returns come from the noise-free
// evaluation episodes run after the iteration's update.
struct MetricsRow {
  int iteration = 0;
  double mean_return = 0.0;
  double mean_constraint_return = 0.0;
  double violation_fraction = 0.0;  // in [0, 1]
  double policy_kl = 0.0;
  std::optional<double> lambda;      // empty for algorithms without a multiplier
  std::optional<double> wall_clock;  // seconds since the run started, when recorded

  void validate() const;
};

// Columns in MetricsRow field order; empty fields for missing optionals.
std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);
std::string metrics_csv(const std::vector<MetricsRow>& rows);
// Skips '#' lines, maps columns by name and ignores columns it does not know.
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

// Long-format plot data: one (iteration, series, value) triple per line.
struct TraceRow {
  int iteration = 0;
  std::string series;
  double value = 0.0;
};

std::string traces_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> parse_traces_csv(const std::string& text);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace safe_rl::harness
