#pragma once

namespace sqt {

namespace constants {
inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double light_speed = 299792458.0;      // m/s
inline constexpr double atomic_mass = 1.66053906660e-27;  // kg
inline constexpr double electron_volt = 1.602176634e-19;  // J
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hc_joule_cm = planck * light_speed * 100.0;  // J per cm^-1
inline constexpr double mass_hydrogen_u = 1.00782503223;
inline constexpr double mass_nitrogen_u = 14.00307400443;
inline constexpr double ammonia_inversion_ghz = 23.79;
}  // namespace constants

enum class UnitMode { Dimensionless, Spectroscopic };

// Internal units are self-consistent: energy*time = action, mass = energy*time^2/length^2.
// Spectroscopic mode works in cm^-1, angstrom and ps.
struct UnitSystem {
  UnitMode mode = UnitMode::Dimensionless;
  double hbar = 1.0;
  double mass = 1.0;
  double length_scale = 1.0;  // metres per internal length unit
  double energy_scale = 1.0;  // joules per internal energy unit
  double time_scale = 1.0;    // seconds per internal time unit
  double mass_u = 0.0;        // particle mass in u (spectroscopic only)

  static UnitSystem dimensionless();
  static UnitSystem spectroscopic(double mass_u);

  double hbar2_over_2m() const { return hbar * hbar / (2.0 * mass); }
  double diffusion() const { return hbar / mass; }  // sigma^2

  double energy_to_si(double e) const { return e * energy_scale; }
  double energy_from_si(double j) const { return j / energy_scale; }
  double length_to_si(double x) const { return x * length_scale; }
  double length_from_si(double m) const { return m / length_scale; }
  double time_to_si(double t) const { return t * time_scale; }
  double time_from_si(double s) const { return s / time_scale; }

  // Frequency of an energy quantum E/h and of a time 1/t, both in GHz.
  double energy_to_ghz(double e) const;
  double inverse_time_to_ghz(double t) const;
  double energy_to_mev(double e) const;
};

}  // namespace sqt
