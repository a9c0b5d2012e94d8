#pragma once

#include <map>
#include <string>
#include <vector>

#include "equiheat/config.hpp"

namespace equiheat {

/// One numeric output with its error estimate.
struct ReportValue {
  double value = 0.0;
  double error = 0.0;
};

/// One pass/fail check against a declared tolerance.
struct ReportCheck {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// A named CSV table: header tokens plus row-major data.
struct ReportTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  ExperimentConfig inputs;
  std::map<std::string, ReportValue> outputs;
  std::vector<ReportCheck> checks;
  std::map<std::string, ReportTable> tables;
  double wall_clock_seconds = 0.0;
  std::string version = "0.1.0";
  bool pass = true;

  void add_output(const std::string& name, double value, double error = 0.0);
  void add_check(const std::string& name, double value, double target, double tolerance);
};

/// Deterministic JSON (sorted keys, shortest-round-trip doubles). The
/// timestamp field is the only part excluded from byte-level reproducibility.
std::string report_to_json(const ExperimentReport& report, bool with_timestamp = true);

/// CSV with a header row; one file per table.
std::string table_to_csv(const ReportTable& table);

/// Writes report.json plus <name>.csv per table into out_dir (atomically:
/// temp file then rename). Returns the JSON path.
std::string emit_report(const ExperimentReport& report, const std::string& out_dir);

}  // namespace equiheat
