#include "sqt/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "sqt/error.hpp"
#include "sqt/simd/normal.hpp"
#include "sqt/simd/step.hpp"

namespace sqt {

double drift_cap(double sigma2, double dt) { return 10.0 * std::sqrt(sigma2 / dt); }

StopRule resolve_stop_rule(const StopRule& r, const OsmoticField& f) {
  StopRule s = r;
  if (!std::isfinite(s.reflect_lo)) s.reflect_lo = f.lo();
  if (!std::isfinite(s.reflect_hi) && f.hard_walls()) s.reflect_hi = f.hi();
  return s;
}

std::uint64_t default_max_steps(double tau_estimate, double dt) {
  if (!(tau_estimate > 0.0 && dt > 0.0)) throw DomainError("default_max_steps needs positive inputs");
  return static_cast<std::uint64_t>(std::ceil(100.0 * tau_estimate / dt));
}

void validate(const TrajectoryConfig& c, const OsmoticField& f) {
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
  const StopRule s = resolve_stop_rule(c.stop, f);
  if (s.reflect_lo < f.lo()) throw ConfigError("reflecting boundary lies outside the field domain");
  if (!(c.x_init > s.reflect_lo && c.x_init < s.absorb_at))
    throw ConfigError("x_init must lie strictly between the reflecting and absorbing boundaries");
  if (std::isfinite(s.reflect_hi) && !(c.x_init < s.reflect_hi))
    throw ConfigError("x_init must lie below the upper reflecting boundary");
  if (!std::isfinite(s.absorb_at) && !std::isfinite(s.reflect_hi))
    throw ConfigError("an unbounded run needs an absorbing or reflecting upper boundary");
  if (c.max_steps == 0) throw ConfigError("max_steps must be positive");
  if (!c.horizon_override) {
    if (!(c.expected_mfpt > 0.0))
      throw ConfigError("set expected_mfpt or horizon_override to validate the step horizon");
    if (!(static_cast<double>(c.max_steps) * c.dt > 50.0 * c.expected_mfpt))
      throw ConfigError("max_steps*dt must exceed 50x the expected MFPT");
  }
}

namespace {

simd::WalkParams walk_params(const TrajectoryConfig& c, const OsmoticField& f) {
  const StopRule s = resolve_stop_rule(c.stop, f);
  simd::WalkParams p;
  p.dt = c.dt;
  p.noise = std::sqrt(f.diffusion() * c.dt);
  p.cap = drift_cap(f.diffusion(), c.dt);
  p.reflect_lo = s.reflect_lo;
  p.reflect_hi = s.reflect_hi;
  p.absorb_at = s.absorb_at;
  p.x_init = c.x_init;
  p.max_steps = c.max_steps;
  p.seed = c.seed;
  return p;
}

}  // namespace

FirstPassage simulate_first_passage(const TrajectoryConfig& c, const OsmoticField& f,
                                    const std::function<double(double)>& V) {
  validate(c, f);
  const simd::WalkParams p = walk_params(c, f);
  const simd::DriftTable table = f.drift_table(p.cap);
  const bool record = c.record_stride > 0;
  if (record && !V) throw ConfigError("energy recording needs the potential");

  FirstPassage r;
  EnergySeries es;
  double esum = 0.0;
  double x = p.x_init;
  std::uint64_t n = 0;
  bool done = false;
  while (!done) {
    if (n >= p.max_steps) {
      r.timed_out = true;
      break;
    }
    double z[2];
    simd::normal_pair(p.seed, c.trajectory_id, n / 2, z[0], z[1]);
    for (int k = 0; k < 2; ++k) {
      if (k == 1 && n >= p.max_steps) {
        r.timed_out = true;
        done = true;
        break;
      }
      const simd::StepOut s = simd::em_step(table, p, x, z[k]);
      if (record) {
        const double e = 0.5 * f.mass() * s.u_raw * s.u_raw + V(x);
        esum += e;
        if (n % c.record_stride == 0) {
          const double t = static_cast<double>(n) * c.dt;
          r.path.push_back({n, t, x, s.u_raw, e});
          es.times.push_back(t);
          es.energies.push_back(e);
          es.positions.push_back(x);
        }
      }
      x = s.x;
      ++n;
      r.clamped += s.clamped ? 1 : 0;
      if (!std::isfinite(x)) throw NumericalError("non-finite position at step " + std::to_string(n));
      if (x >= p.absorb_at) {
        done = true;
        break;
      }
    }
  }
  r.steps = n;
  r.tau = static_cast<double>(n) * c.dt;
  if (record) {
    es.mean = n > 0 ? esum / static_cast<double>(n) : 0.0;
    r.energy = std::move(es);
  }
  return r;
}

EnsembleRun run_ensemble(const EnsembleConfig& c, const OsmoticField& f) {
  EnsembleRun run;
  run.isa = c.isa ? *c.isa : simd::detect_isa();
  if (!simd::isa_supported(run.isa)) throw ConfigError(std::string("ISA not supported: ") + simd::isa_name(run.isa));
  if (c.n == 0) return run;
  validate(c.base, f);
  const simd::WalkParams p = walk_params(c.base, f);
  const simd::DriftTable table = f.drift_table(p.cap);

  std::vector<simd::WalkOutcome> out(c.n);
  const std::uint64_t chunk = 64;
  const std::uint64_t n_chunks = (c.n + chunk - 1) / chunk;
  unsigned workers = c.workers ? c.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
  std::atomic<std::uint64_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::uint64_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      const std::uint64_t first = k * chunk;
      const std::uint64_t cnt = std::min(chunk, c.n - first);
      simd::walk(run.isa, table, p, c.base.trajectory_id + first, cnt, out.data() + first);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  run.records.resize(c.n);
  for (std::uint64_t j = 0; j < c.n; ++j) {
    const auto& o = out[j];
    if (o.status == simd::kNonFinite)
      throw NumericalError("non-finite position in trajectory " + std::to_string(c.base.trajectory_id + j) +
                           " at step " + std::to_string(o.steps));
    run.records[j] = {c.base.trajectory_id + j, c.base.seed, static_cast<double>(o.steps) * c.base.dt, o.steps,
                      o.clamped, o.status == simd::kTimedOut};
    run.clamped_total += o.clamped;
  }
  return run;
}

}  // namespace sqt
