#include "sqt/ammonia.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sqt/dynamics.hpp"
#include "sqt/error.hpp"
#include "sqt/io.hpp"
#include "sqt/osmotic.hpp"

namespace sqt {

void SpectroscopicTargets::validate() const {
  if (!(delta_e0 > 0.0 && delta_e1 > 0.0 && pair_gap > 0.0)) throw ConfigError("targets must be positive");
  if (!(delta_e0 < delta_e1 && delta_e1 < pair_gap)) throw ConfigError("targets need dE0 < dE1 < pair gap");
}

RmSplittings rm_splittings(const RosenMorseDouble& p, const UnitSystem& u, std::size_t grid_points) {
  RmSplittings s;
  s.levels = rm_levels(p, u, 4, grid_points);
  s.delta_e0 = s.levels[1] - s.levels[0];
  s.delta_e1 = s.levels[3] - s.levels[2];
  s.pair_gap = s.levels[3] - s.levels[0];
  return s;
}

double fit_objective(const RmSplittings& s, const SpectroscopicTargets& t, const FitOptions& o) {
  const double r0 = (s.delta_e0 - t.delta_e0) / t.delta_e0;
  const double r1 = (s.delta_e1 - t.delta_e1) / t.delta_e1;
  const double r2 = (s.pair_gap - t.pair_gap) / t.pair_gap;
  return o.w0 * r0 * r0 + o.w1 * r1 * r1 + o.w2 * r2 * r2;
}

namespace {

struct FitContext {
  const SpectroscopicTargets* targets;
  const FitOptions* opts;
  const UnitSystem* units;
  double d, k;
  int evaluations = 0;
  double best = std::numeric_limits<double>::infinity();
  FitResult best_result;
};

// Parameters live in the unit square; outside it the objective grows quadratically.
double fit_eval(const gsl_vector* v, void* raw) {
  auto* c = static_cast<FitContext*>(raw);
  const double s0 = gsl_vector_get(v, 0), s1 = gsl_vector_get(v, 1);
  const double t0 = std::clamp(s0, 0.0, 1.0), t1 = std::clamp(s1, 0.0, 1.0);
  const double penalty = 1e3 * ((s0 - t0) * (s0 - t0) + (s1 - t1) * (s1 - t1));
  const double A = c->opts->a_min + t0 * (c->opts->a_max - c->opts->a_min);
  const double B = c->opts->b_min + t1 * (c->opts->b_max - c->opts->b_min);
  ++c->evaluations;
  RosenMorseDouble p;
  RmSplittings s;
  try {
    p = RosenMorseDouble::make(A, B, c->d, c->k);
    s = rm_splittings(p, *c->units, c->opts->grid_points);
  } catch (const std::exception&) {
    return 1e6 + penalty;
  }
  const double j = fit_objective(s, *c->targets, *c->opts);
  if (j < c->best) {
    c->best = j;
    c->best_result.params = p;
    c->best_result.splittings = s;
    c->best_result.objective = j;
  }
  return j + penalty;
}

}  // namespace

FitResult fit_rm_parameters(const SpectroscopicTargets& t, double d, double k, const UnitSystem& u,
                            const FitOptions& o) {
  t.validate();
  if (!(o.a_min >= 0.0 && o.a_max > o.a_min && o.b_min > 0.0 && o.b_max > o.b_min))
    throw ConfigError("fit bounds must be ordered with A >= 0 and B > 0");
  FitContext ctx{&t, &o, &u, d, k, 0, std::numeric_limits<double>::infinity(), {}};
  const std::array<std::array<double, 2>, 4> starts{{{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.9}}};
  gsl_multimin_function fn{&fit_eval, 2, &ctx};
  for (const auto& s : starts) {
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, s[0]);
    gsl_vector_set(x, 1, s[1]);
    gsl_vector_set_all(step, 0.1);
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(m, &fn, x, step);
    for (int it = 0; it < o.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(m)) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-6) == GSL_SUCCESS) break;
    }
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(x);
    gsl_vector_free(step);
  }
  FitResult r = ctx.best_result;
  r.evaluations = ctx.evaluations;
  const double rel0 = std::abs(r.splittings.delta_e0 - t.delta_e0) / t.delta_e0;
  if (!(rel0 <= 0.05))
    throw NumericalError("fit failed: best dE0 " + fmt17(r.splittings.delta_e0) + " at A=" + fmt17(r.params.A) +
                         " B=" + fmt17(r.params.B));
  return r;
}

double inversion_frequency(double tau_bar_ps) {
  if (!(tau_bar_ps > 0.0)) throw DomainError("inversion frequency needs tau_bar > 0");
  return 1e3 / (constants::pi * tau_bar_ps);
}

AmmoniaReport run_ammonia_pipeline(const AmmoniaConfig& c) {
  AmmoniaReport r;
  r.mass_u = reduced_mass(c.m_h, c.m_n);
  const UnitSystem u = UnitSystem::spectroscopic(r.mass_u);
  try {
    if (c.fit) {
      auto opts = c.fit_options;
      opts.grid_points = c.grid_points;
      r.fit = fit_rm_parameters(c.targets, c.d, c.k, u, opts);
      r.potential = r.fit->params;
    } else {
      r.potential = RosenMorseDouble::make(c.A, c.B, c.d, c.k);
    }
  } catch (const std::exception& e) {
    throw NumericalError(std::string("[fit] ") + e.what());
  }
  try {
    r.geometry = rm_derived_geometry(r.potential);
    const auto s = rm_splittings(r.potential, u, c.grid_points);
    r.ground = spectrum_pair(s.levels[0], s.levels[1], u);
    r.excited = spectrum_pair(s.levels[2], s.levels[3], u);
    r.pair_gap = s.pair_gap;
    r.ground_state = numerov_bound_state(r.potential, u, RmLevel::Ground, c.grid_points);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("[levels] ") + e.what());
  }
  try {
    r.turning = turning_points(r.potential, r.ground.e0);
    const double a = r.ground_state.grid.lo;
    r.tau_bar = mfpt_quadrature(r.ground_state, u, a, -r.turning.b_inner, r.turning.b_inner);
    r.exterior_mass = exterior_mass(r.ground_state, a);
    const auto hb = mfpt_high_barrier_quadrature(r.ground_state, u, r.turning);
    r.tau_high_barrier = hb.tau;
    r.occupancy = hb.occupancy;
    r.nu_sq = inversion_frequency(r.tau_bar);
    r.nu_qm = u.energy_to_ghz(r.ground.delta_e);
    r.tau_qm = 0.5 * r.ground.period;
    r.wkb = wkb_quantities(r.potential, u, r.ground.e0, r.turning);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("[mfpt] ") + e.what());
  }
  if (c.ensemble.n > 0) {
    try {
      const auto field = OsmoticField::from_state(r.ground_state, u);
      EnsembleConfig ec;
      ec.base.dt = c.ensemble.dt_ps;
      ec.base.seed = c.ensemble.seed;
      ec.base.x_init = -r.turning.b_inner;
      ec.base.stop.absorb_at = r.turning.b_inner;
      ec.base.stop.reflect_lo = r.ground_state.grid.lo;
      ec.base.expected_mfpt = r.tau_bar;
      ec.base.max_steps = default_max_steps(r.tau_bar, ec.base.dt);
      ec.n = c.ensemble.n;
      ec.workers = c.ensemble.workers;
      ec.isa = c.ensemble.isa;
      auto run = run_ensemble(ec, field);
      AmmoniaEnsembleSummary sum;
      const std::string digest =
          hex64(fnv1a64(fmt17(r.potential.A) + fmt17(r.potential.B) + fmt17(ec.base.dt) +
                        std::to_string(ec.base.seed) + std::to_string(ec.n)));
      sum.stats = make_ensemble(run.records, digest);
      if (c.ensemble.tail_threshold)
        sum.tail = fit_exponential_tail(sum.stats, *c.ensemble.tail_threshold);
      else
        sum.tail = fit_exponential_tail(sum.stats);
      sum.clamped_total = run.clamped_total;
      sum.isa = run.isa;
      sum.records = std::move(run.records);
      r.ensemble = std::move(sum);
    } catch (const std::exception& e) {
      throw NumericalError(std::string("[ensemble] ") + e.what());
    }
  }
  return r;
}

RatioPoint ratio_point(const RosenMorseDouble& p, const UnitSystem& u, std::size_t grid_points) {
  RatioPoint r;
  const auto g = rm_derived_geometry(p);
  r.B = p.B;
  r.V0 = g.V0;
  r.V0_mev = u.energy_to_mev(g.V0);
  r.fraction = g.V0 / g.VD;
  const auto lv = rm_levels(p, u, 2, grid_points);
  r.delta_e0 = lv[1] - lv[0];
  r.tau_qm = constants::pi * u.hbar / r.delta_e0;
  const auto s = numerov_bound_state(p, u, RmLevel::Ground, grid_points);
  const auto tp = turning_points(p, s.energy);
  r.tau_bar = mfpt_quadrature(s, u, s.grid.lo, -tp.b_inner, tp.b_inner);
  r.ratio = r.tau_qm / r.tau_bar;
  return r;
}

double b_for_barrier(double A, double d, double k, double v0) {
  auto f = [&](double B) { return rm_derived_geometry(RosenMorseDouble{A, B, d, k}).V0 - v0; };
  double lo = 0.5 * A + 1e-9, hi = std::max(2.0 * lo, 1.0);
  while (f(hi) < 0.0) hi *= 2.0;
  if (f(lo) > 0.0) throw DomainError("barrier height below reach at this A");
  return bisect(f, lo, hi, 1e-10);
}

std::vector<StoppingPoint> stopping_rule_scan(const RosenMorseDouble& p, const UnitSystem& u, std::size_t count,
                                              std::size_t grid_points) {
  if (count < 2) throw DomainError("stopping-rule scan needs at least 2 points");
  const auto g = rm_derived_geometry(p);
  const auto lv = rm_levels(p, u, 2, grid_points);
  const double tau_qm = constants::pi * u.hbar / (lv[1] - lv[0]);
  const auto s = numerov_bound_state(p, u, RmLevel::Ground, grid_points);
  const auto tp = turning_points(p, s.energy);
  std::vector<StoppingPoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double xf = tp.b_inner + (g.x0 - tp.b_inner) * static_cast<double>(i) / static_cast<double>(count - 1);
    const double tau = mfpt_quadrature(s, u, s.grid.lo, -xf, xf);
    out.push_back({xf, tau, tau_qm / tau});
  }
  return out;
}

}  // namespace sqt
