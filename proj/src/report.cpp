#include "equiheat/report.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "equiheat/errors.hpp"
#include "json.hpp"

namespace equiheat {

void ExperimentReport::add_output(const std::string& name, double value, double error) {
  outputs[name] = {value, error};
}

void ExperimentReport::add_check(const std::string& name, double value, double target,
                                 double tolerance) {
  bool ok = std::abs(value - target) <= tolerance;
  checks.push_back({name, value, target, tolerance, ok});
  if (!ok) pass = false;
}

std::string report_to_json(const ExperimentReport& report, bool with_timestamp) {
  nlohmann::ordered_json j;
  j["version"] = report.version;
  j["pass"] = report.pass;
  nlohmann::ordered_json inputs;
  for (const auto& [k, v] : report.inputs.entries()) inputs[k] = v;
  j["inputs"] = inputs;
  nlohmann::ordered_json outputs;
  for (const auto& [k, v] : report.outputs) {
    outputs[k] = {{"value", v.value}, {"error", v.error}};
  }
  j["outputs"] = outputs;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"target", c.target},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  j["checks"] = checks;
  nlohmann::ordered_json tables;
  for (const auto& [name, t] : report.tables) {
    nlohmann::ordered_json tb;
    tb["columns"] = t.columns;
    tb["rows"] = t.rows;
    tables[name] = tb;
  }
  j["tables"] = tables;
  // volatile fields live together so the reproducibility comparison can
  // simply drop them
  if (with_timestamp) {
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    j["timestamp"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  }
  return j.dump(2) + "\n";
}

std::string table_to_csv(const ReportTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += table.columns[i];
    out += (i + 1 < table.columns.size()) ? "," : "\n";
  }
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out += buf;
      out += (i + 1 < row.size()) ? "," : "\n";
    }
  }
  return out;
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DomainError("emit_report: cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string emit_report(const ExperimentReport& report, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DomainError("emit_report: cannot create directory " + out_dir);
  std::filesystem::path json_path = dir / "report.json";
  write_atomic(json_path, report_to_json(report));
  for (const auto& [name, t] : report.tables) write_atomic(dir / (name + ".csv"), table_to_csv(t));
  return json_path.string();
}

}  // namespace equiheat
