#include "safe_rl/harness/metrics.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "safe_rl/common/error.hpp"

namespace safe_rl::harness {

namespace {

constexpr const char* kColumns[] = {"iteration",          "mean_return", "mean_constraint_return",
                                    "violation_fraction", "policy_kl",   "lambda",
                                    "wall_clock"};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::kInvalidArgument,
          "bad number '" + s + "' in " + what);
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::kInvalidArgument,
          "bad integer '" + s + "' in " + what);
  return v;
}

// Data lines of a CSV document with its header mapped to column indices.
struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    std::vector<std::string> fields = split(line, ',');
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) t.columns[fields[i]] = i;
      have_header = true;
      continue;
    }
    require(fields.size() == t.columns.size(), ErrorCode::kInvalidArgument, "ragged CSV row: " + line);
    t.rows.push_back(std::move(fields));
  }
  require(have_header, ErrorCode::kInvalidArgument, "CSV has no header");
  return t;
}

const std::string* field(const Table& t, const std::vector<std::string>& row, const char* name) {
  const auto it = t.columns.find(name);
  return it == t.columns.end() ? nullptr : &row[it->second];
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  require(ec == std::errc(), ErrorCode::kNumerical, "cannot format number");
  return std::string(buf, ptr);
}

void MetricsRow::validate() const {
  require(violation_fraction >= 0.0 && violation_fraction <= 1.0, ErrorCode::kInvariantViolation,
          "violation fraction outside [0, 1]");
}

std::string metrics_header() {
  std::string h;
  for (const char* c : kColumns) h += (h.empty() ? "" : ",") + std::string(c);
  return h;
}

std::string format_metrics_row(const MetricsRow& r) {
  r.validate();
  std::string s = std::to_string(r.iteration);
  for (double v : {r.mean_return, r.mean_constraint_return, r.violation_fraction, r.policy_kl}) {
    s += "," + format_double(v);
  }
  s += "," + (r.lambda ? format_double(*r.lambda) : std::string());
  s += "," + (r.wall_clock ? format_double(*r.wall_clock) : std::string());
  return s;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = std::string("# schema=") + kMetricsSchema + "\n" + metrics_header() + "\n";
  for (const MetricsRow& r : rows) out += format_metrics_row(r) + "\n";
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  const Table t = read_table(text);
  for (const char* required : {"iteration", "mean_return", "mean_constraint_return", "violation_fraction"}) {
    require(t.columns.count(required) > 0, ErrorCode::kInvalidArgument,
            std::string("metrics CSV lacks column ") + required);
  }
  std::vector<MetricsRow> out;
  for (const auto& row : t.rows) {
    MetricsRow m;
    m.iteration = parse_int(*field(t, row, "iteration"), "iteration");
    m.mean_return = parse_double(*field(t, row, "mean_return"), "mean_return");
    m.mean_constraint_return = parse_double(*field(t, row, "mean_constraint_return"), "mean_constraint_return");
    m.violation_fraction = parse_double(*field(t, row, "violation_fraction"), "violation_fraction");
    if (const std::string* f = field(t, row, "policy_kl"); f && !f->empty()) m.policy_kl = parse_double(*f, "policy_kl");
    if (const std::string* f = field(t, row, "lambda"); f && !f->empty()) m.lambda = parse_double(*f, "lambda");
    if (const std::string* f = field(t, row, "wall_clock"); f && !f->empty()) {
      m.wall_clock = parse_double(*f, "wall_clock");
    }
    m.validate();
    out.push_back(m);
  }
  return out;
}

std::string traces_csv(const std::vector<TraceRow>& rows) {
  std::string out = std::string("# schema=") + kTracesSchema + "\niteration,series,value\n";
  for (const TraceRow& r : rows) {
    require(r.series.find(',') == std::string::npos, ErrorCode::kInvalidArgument, "series name contains a comma");
    out += std::to_string(r.iteration) + "," + r.series + "," + format_double(r.value) + "\n";
  }
  return out;
}

std::vector<TraceRow> parse_traces_csv(const std::string& text) {
  const Table t = read_table(text);
  for (const char* required : {"iteration", "series", "value"}) {
    require(t.columns.count(required) > 0, ErrorCode::kInvalidArgument,
            std::string("traces CSV lacks column ") + required);
  }
  std::vector<TraceRow> out;
  for (const auto& row : t.rows) {
    out.push_back({parse_int(*field(t, row, "iteration"), "iteration"), *field(t, row, "series"),
                   parse_double(*field(t, row, "value"), "value")});
  }
  return out;
}

}  // namespace safe_rl::harness
