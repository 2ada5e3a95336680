#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqt/closed_forms.hpp"
#include "sqt/eigensolver.hpp"
#include "sqt/first_passage.hpp"
#include "sqt/potentials.hpp"
#include "sqt/simd/kernel.hpp"
#include "sqt/units.hpp"

namespace sqt {

struct SpectroscopicTargets {
  double delta_e0 = 0.8;   // E0+ - E0-, cm^-1
  double delta_e1 = 33.0;  // E1+ - E1-, cm^-1
  double pair_gap = 950.0; // E1+ - E0-, cm^-1
  void validate() const;
};

struct FitOptions {
  double w0 = 100.0, w1 = 1.0, w2 = 1.0;  // weights on relative errors
  double a_min = 0.0, a_max = 1000.0;
  double b_min = 2200.0, b_max = 3000.0;
  std::size_t grid_points = 8001;
  int max_iterations = 300;
};

struct RmSplittings {
  double delta_e0, delta_e1, pair_gap;
  std::vector<double> levels;
};

struct FitResult {
  RosenMorseDouble params;
  RmSplittings splittings;
  double objective = 0.0;
  int evaluations = 0;
};

RmSplittings rm_splittings(const RosenMorseDouble& p, const UnitSystem& u, std::size_t grid_points = 8001);
double fit_objective(const RmSplittings& s, const SpectroscopicTargets& t, const FitOptions& o);
FitResult fit_rm_parameters(const SpectroscopicTargets& t, double d, double k, const UnitSystem& u,
                            const FitOptions& o = {});

// nu_SQ = 1/(pi tau_bar) in GHz, tau_bar in ps.
double inversion_frequency(double tau_bar_ps);

struct AmmoniaEnsembleConfig {
  std::uint64_t n = 0;
  double dt_ps = 1e-5;
  std::uint64_t seed = 20240917;
  unsigned workers = 0;
  std::optional<simd::Isa> isa;
  std::optional<double> tail_threshold;  // default: sample median
};

struct AmmoniaConfig {
  SpectroscopicTargets targets;
  double d = 0.17;
  double k = 2.22;
  double m_h = constants::mass_hydrogen_u;
  double m_n = constants::mass_nitrogen_u;
  bool fit = true;          // false: use A, B below as given
  double A = 398.0, B = 2810.0;
  FitOptions fit_options;
  std::size_t grid_points = 8001;
  AmmoniaEnsembleConfig ensemble;
};

struct AmmoniaEnsembleSummary {
  FptEnsemble stats;
  std::optional<TailFit> tail;
  std::uint64_t clamped_total = 0;
  simd::Isa isa = simd::Isa::Scalar;
  std::vector<TrajectoryRecord> records;
};

struct AmmoniaReport {
  double mass_u = 0.0;
  RosenMorseDouble potential;
  std::optional<FitResult> fit;
  RmGeometry geometry{};
  SpectrumPair ground{}, excited{};
  double pair_gap = 0.0;
  TurningPoints turning{};
  double tau_bar = 0.0;
  double tau_high_barrier = 0.0;
  double occupancy = 0.0;
  double exterior_mass = 0.0;
  double nu_sq = 0.0, nu_qm = 0.0, nu_exp = constants::ammonia_inversion_ghz;
  double tau_qm = 0.0;
  WkbQuantities wkb{};
  BoundState ground_state;
  std::optional<AmmoniaEnsembleSummary> ensemble;
};

AmmoniaReport run_ammonia_pipeline(const AmmoniaConfig& c);

// Ratio tau_QM / tau_bar for a Rosen-Morse potential, tau_QM = pi hbar / dE0.
struct RatioPoint {
  double B;
  double V0;        // cm^-1
  double V0_mev;
  double fraction;  // V0 / VD
  double delta_e0;
  double tau_qm;
  double tau_bar;
  double ratio;
};
RatioPoint ratio_point(const RosenMorseDouble& p, const UnitSystem& u, std::size_t grid_points = 8001);
// B giving barrier height v0 (cm^-1) at fixed A, d, k.
double b_for_barrier(double A, double d, double k, double v0);

struct StoppingPoint {
  double x_f;
  double tau_bar;
  double ratio;
};
// tau_bar(x_f) for symmetric windows (-x_f, x_f), x_f from b_inner to x0.
std::vector<StoppingPoint> stopping_rule_scan(const RosenMorseDouble& p, const UnitSystem& u, std::size_t count,
                                              std::size_t grid_points = 8001);

}  // namespace sqt
