#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sqt/osmotic.hpp"
#include "sqt/simd/kernel.hpp"

namespace sqt {

struct StopRule {
  double absorb_at = INFINITY;
  double reflect_lo = -INFINITY;
  double reflect_hi = INFINITY;
};

struct TrajectoryConfig {
  double dt = 1e-4;
  std::uint64_t seed = 0;
  std::uint64_t trajectory_id = 0;
  double x_init = 0.0;
  StopRule stop;
  std::uint64_t max_steps = 0;
  std::uint64_t record_stride = 0;  // 0 = first passage only
  double expected_mfpt = 0.0;       // 0 = unknown
  bool horizon_override = false;
};

struct PathSample {
  std::uint64_t step;
  double t;
  double x;
  double u;
  double energy;
};

struct EnergySeries {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> positions;
  double mean = 0.0;  // over every step, not only recorded samples
};

struct FirstPassage {
  double tau = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t clamped = 0;
  bool timed_out = false;
  std::vector<PathSample> path;
  std::optional<EnergySeries> energy;
};

struct TrajectoryRecord {
  std::uint64_t trajectory_id;
  std::uint64_t seed;
  double tau;
  std::uint64_t steps;
  std::uint64_t clamped;
  bool timed_out;
};

// Drift clamp: one clamped step moves at most ten noise standard deviations.
double drift_cap(double sigma2, double dt);
// Fills reflecting edges from the field's domain when the rule leaves them open.
StopRule resolve_stop_rule(const StopRule& r, const OsmoticField& f);
void validate(const TrajectoryConfig& c, const OsmoticField& f);
std::uint64_t default_max_steps(double tau_estimate, double dt);

// V is needed only when recording energies (record_stride > 0).
FirstPassage simulate_first_passage(const TrajectoryConfig& c, const OsmoticField& f,
                                    const std::function<double(double)>& V = {});

struct EnsembleConfig {
  TrajectoryConfig base;  // trajectory ids run base.trajectory_id .. + n - 1
  std::uint64_t n = 0;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::optional<simd::Isa> isa;
};

struct EnsembleRun {
  std::vector<TrajectoryRecord> records;
  std::uint64_t clamped_total = 0;
  simd::Isa isa = simd::Isa::Scalar;
};

EnsembleRun run_ensemble(const EnsembleConfig& c, const OsmoticField& f);

}  // namespace sqt
