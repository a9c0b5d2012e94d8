#include "equiheat/config.hpp"

#include <fstream>
#include <sstream>

#include "equiheat/errors.hpp"

namespace equiheat {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config", "line " + std::to_string(lineno) +
                                          ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config", "empty key on line " + std::to_string(lineno));
    cfg.kv_[key] = value;
  }
  return cfg;
}

std::string ExperimentConfig::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ValidationError(key, "required key missing");
  return it->second;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const ValidationError&) {
    throw;
  } catch (...) {
    throw ValidationError(key, "not a number: '" + get(key) + "'");
  }
}

double ExperimentConfig::get_double(const std::string& key, double dflt) const {
  if (!has(key)) return dflt;
  return get_double(key);
}

int ExperimentConfig::get_int(const std::string& key) const {
  try {
    return std::stoi(get(key));
  } catch (const ValidationError&) {
    throw;
  } catch (...) {
    throw ValidationError(key, "not an integer: '" + get(key) + "'");
  }
}

int ExperimentConfig::get_int(const std::string& key, int dflt) const {
  if (!has(key)) return dflt;
  return get_int(key);
}

std::uint64_t ExperimentConfig::get_seed(std::uint64_t dflt) const {
  if (!has("seed")) return dflt;
  try {
    return std::stoull(get("seed"));
  } catch (...) {
    throw ValidationError("seed", "not an unsigned integer");
  }
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  std::stringstream ss(get(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw ValidationError(key, "not an integer list: '" + get(key) + "'");
    }
  }
  if (out.empty()) throw ValidationError(key, "empty list");
  return out;
}

}  // namespace equiheat
