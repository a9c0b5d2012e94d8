#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace equiheat {

/// Flat key = value configuration (one pair per line, '#' comments). No
/// nesting: keys are documented in the README and validated per experiment.
class ExperimentConfig {
 public:
  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get(const std::string& key) const;                       // throws ValidationError
  std::string get(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int dflt) const;
  std::uint64_t get_seed(std::uint64_t dflt = 42) const;
  std::vector<int> get_int_list(const std::string& key) const;         // comma-separated

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace equiheat
