#include "sqt/units.hpp"

#include <cmath>
#include <string>

#include "sqt/error.hpp"

namespace sqt {

UnitSystem UnitSystem::dimensionless() { return UnitSystem{}; }

UnitSystem UnitSystem::spectroscopic(double mass_u) {
  if (!(mass_u > 0.0) || !std::isfinite(mass_u))
    throw DomainError("spectroscopic units need a positive mass in u, got " + std::to_string(mass_u));
  UnitSystem u;
  u.mode = UnitMode::Spectroscopic;
  u.length_scale = 1e-10;
  u.energy_scale = constants::hc_joule_cm;
  u.time_scale = 1e-12;
  u.mass_u = mass_u;
  const double hbar_si = constants::planck / (2.0 * constants::pi);
  u.hbar = hbar_si / (u.energy_scale * u.time_scale);
  const double kg = mass_u * constants::atomic_mass;
  u.mass = kg * u.length_scale * u.length_scale / (u.energy_scale * u.time_scale * u.time_scale);
  return u;
}

double UnitSystem::energy_to_ghz(double e) const {
  return energy_to_si(e) / constants::planck * 1e-9;
}

double UnitSystem::inverse_time_to_ghz(double t) const {
  return 1.0 / time_to_si(t) * 1e-9;
}

double UnitSystem::energy_to_mev(double e) const {
  return energy_to_si(e) / constants::electron_volt * 1e3;
}

}  // namespace sqt
