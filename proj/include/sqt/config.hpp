#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sqt/potentials.hpp"
#include "sqt/units.hpp"

namespace sqt {

// INI-style configuration: [section] headers and key = value lines.
// Keys are addressed as "section.key". Every key must be consumed, otherwise
// reject_unused() names the stray key.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void reject_unused() const;
  // Sorted key=value lines; the basis of the run digest.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  const std::string& raw(const std::string& key) const;
};

struct PotentialSpec {
  Potential potential;
  UnitSystem units;
};

// Reads the [potential] section.
PotentialSpec load_potential(const Config& c);

}  // namespace sqt
