#include "sqt/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include "sqt/error.hpp"

namespace sqt {

Config Config::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) c.values_[section + "." + key] = value.get_value<std::string>();
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

namespace {
double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ConfigError("config key '" + key + "' is not a number: '" + s + "'");
  return v;
}
}  // namespace

double Config::get_double(const std::string& key) const { return to_double(key, raw(key)); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = raw(key);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("config key '" + key + "' is not an unsigned integer: '" + s + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = raw(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(raw(key));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty list element in '" + key + "'");
    out.push_back(to_double(key, tok.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' holds an empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::reject_unused() const {
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
  return s;
}

PotentialSpec load_potential(const Config& c) {
  const std::string family = c.get_string("potential.family");
  PotentialSpec ps;
  if (family == "square") {
    const std::string units = c.get_string("potential.units", "dimensionless");
    if (units != "dimensionless") throw ConfigError("unit error: the square well runs in dimensionless units only");
    if (c.has("potential.mass_u")) throw ConfigError("unit error: mass_u has no meaning in dimensionless units");
    ps.potential = SquareDoubleWell::make(c.get_double("potential.b"), c.get_double("potential.d"),
                                          c.get_double("potential.V0"));
    ps.units = UnitSystem::dimensionless();
  } else if (family == "rosen_morse") {
    const std::string units = c.get_string("potential.units", "spectroscopic");
    ps.potential = RosenMorseDouble::make(c.get_double("potential.A"), c.get_double("potential.B"),
                                          c.get_double("potential.d"), c.get_double("potential.k"));
    if (units == "spectroscopic") {
      const double m = c.has("potential.mass_u")
                           ? c.get_double("potential.mass_u")
                           : reduced_mass(c.get_double("potential.m_h", constants::mass_hydrogen_u),
                                          c.get_double("potential.m_n", constants::mass_nitrogen_u));
      ps.units = UnitSystem::spectroscopic(m);
    } else if (units == "dimensionless") {
      if (c.has("potential.mass_u") || c.has("potential.m_h") || c.has("potential.m_n"))
        throw ConfigError("unit error: masses have no meaning in dimensionless units");
      ps.units = UnitSystem::dimensionless();
    } else {
      throw ConfigError("unit error: unknown units '" + units + "'");
    }
  } else {
    throw ConfigError("unknown potential family '" + family + "' (expected square or rosen_morse)");
  }
  return ps;
}

}  // namespace sqt
