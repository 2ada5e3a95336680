#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sqt/dynamics.hpp"
#include "sqt/error.hpp"
#include "sqt/first_passage.hpp"

using namespace sqt;

namespace {
const UnitSystem kDim = UnitSystem::dimensionless();
const SquareDoubleWell kWell = SquareDoubleWell::make(6.0, 2.0, 2.0);

OsmoticField square_field() { return OsmoticField::square_well(kWell, kDim, solve_square_levels(kWell, kDim).k_even); }

BoundState flat_state(double lo, double hi, std::size_t n) {
  BoundState s;
  s.grid = UniformGrid{lo, hi, n};
  s.psi.assign(n, 1.0 / std::sqrt(hi - lo));
  s.norm_check = 1.0;
  return s;
}

BoundState oscillator_ground() {
  NumerovProblem p{[](double x) { return 0.5 * x * x; }, UniformGrid{-10.0, 10.0, 4001}, false, true};
  return numerov_bound_state(p, kDim, 0);
}

TrajectoryConfig square_config(std::uint64_t seed) {
  TrajectoryConfig c;
  c.dt = 1e-3;
  c.seed = seed;
  c.x_init = -2.0;
  c.stop.absorb_at = 2.0;
  c.max_steps = 3000000;
  c.expected_mfpt = 55.9;
  return c;
}
}  // namespace

TEST_CASE("square-well drift") {
  const auto f = square_field();
  CHECK(f.kind() == FieldKind::ClosedForm);
  CHECK(f.hard_walls());
  CHECK(f.velocity(0.0) == 0.0);
  for (double x = 0.05; x < 2.99; x += 0.1) {
    CAPTURE(x);
    CHECK(f.velocity(-x) == -f.velocity(x));
  }
  // Drift points away from the walls and toward the barrier from inside it.
  CHECK(f.velocity(-2.9) > 0.0);
  CHECK(f.velocity(2.9) < 0.0);
  CHECK(f.velocity(0.5) > 0.0);
  // u = sigma^2 psi'/psi against a centred difference of the closed form.
  const double k = solve_square_levels(kWell, kDim).k_even;
  for (double x : {-2.5, -1.7, -0.3, 0.8, 2.2}) {
    const double h = 1e-6;
    const double dpsi = (square_psi(kWell, kDim, k, Parity::Even, x + h) -
                         square_psi(kWell, kDim, k, Parity::Even, x - h)) /
                        (2.0 * h);
    CHECK(f.velocity(x) == doctest::Approx(dpsi / square_psi(kWell, kDim, k, Parity::Even, x)).epsilon(1e-7));
  }
  // Continuity across the barrier edges.
  CHECK(f.velocity(1.0 - 1e-12) == doctest::Approx(f.velocity(1.0 + 1e-12)).epsilon(1e-9));
  CHECK_THROWS_AS(f.velocity(3.0), DomainError);
  CHECK_THROWS_AS(f.velocity(NAN), DomainError);
  CHECK(osmotic_velocity(f, 0.7) == f.velocity(0.7));
}

TEST_CASE("square-well drift needs the even root") {
  CHECK_THROWS_AS(OsmoticField::square_well(kWell, kDim, 1.0), DomainError);
  CHECK_THROWS_AS(OsmoticField::square_well(kWell, kDim, 3.0), DomainError);
  CHECK_THROWS_AS(OsmoticField::square_well(kWell, kDim, solve_square_levels(kWell, kDim).k_odd), DomainError);
}

TEST_CASE("ammonia drift") {
  const auto u = UnitSystem::spectroscopic(reduced_mass(constants::mass_hydrogen_u, constants::mass_nitrogen_u));
  const auto p = RosenMorseDouble::make(398.0, 2810.0, 0.17, 2.22);
  const auto s = numerov_bound_state(p, u, RmLevel::Ground);
  const auto f = OsmoticField::from_state(s, u);
  const auto g = rm_derived_geometry(p);
  CHECK(f.kind() == FieldKind::GridInterpolated);
  CHECK_FALSE(f.hard_walls());
  CHECK(f.diffusion() == doctest::Approx(u.hbar / u.mass).epsilon(1e-15));
  CHECK(std::abs(f.velocity(0.0)) < 1e-6);
  for (double x : {0.1, 0.3, 0.6, 1.0}) CHECK(f.velocity(-x) == doctest::Approx(-f.velocity(x)).epsilon(1e-6));
  // The density peaks close to the potential minimum.
  const double scale = f.velocity(0.5 * g.x0);
  CHECK(std::abs(f.velocity(g.x0)) < 0.05 * std::abs(scale));
  CHECK_THROWS_AS(f.velocity(s.grid.hi + 0.1), DomainError);
  const auto excited = numerov_bound_state(p, u, RmLevel::FirstExcited);
  CHECK_THROWS_AS(OsmoticField::from_state(excited, u), DomainError);
}

TEST_CASE("instantaneous energy") {
  const auto f = square_field();
  const auto V = as_function(kWell);
  for (double x = -2.95; x < 2.95; x += 0.01) {
    const double e = instantaneous_energy(f, x, V);
    CHECK(e >= V(x));
    if (std::abs(x) < 1.0) CHECK(e >= 2.0);
  }
  // Oscillator ground state: u = -x, so the energy is x^2.
  const auto ho = OsmoticField::from_state(oscillator_ground(), kDim);
  const auto Vh = [](double x) { return 0.5 * x * x; };
  for (double x : {-2.0, -0.5, 0.0, 1.3})
    CHECK(instantaneous_energy(ho, x, Vh) == doctest::Approx(x * x).epsilon(1e-4).scale(1.0));
}

TEST_CASE("step-horizon helpers") {
  CHECK(drift_cap(1.0, 1e-4) == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(drift_cap(4.0, 1e-2) == doctest::Approx(200.0).epsilon(1e-15));
  CHECK(default_max_steps(55.9, 1e-4) == 55900000ULL);
  CHECK_THROWS_AS(default_max_steps(0.0, 1e-4), DomainError);
  CHECK_THROWS_AS(default_max_steps(1.0, -1.0), DomainError);
  const auto f = square_field();
  const StopRule s = resolve_stop_rule(StopRule{2.0}, f);
  CHECK(s.reflect_lo == -3.0);
  CHECK(s.reflect_hi == 3.0);
  CHECK(s.absorb_at == 2.0);
}

TEST_CASE("trajectory validation") {
  const auto f = square_field();
  auto bad = [&](auto mutate) {
    auto c = square_config(1);
    mutate(c);
    CHECK_THROWS_AS(validate(c, f), ConfigError);
  };
  CHECK_NOTHROW(validate(square_config(1), f));
  bad([](TrajectoryConfig& c) { c.dt = 0.0; });
  bad([](TrajectoryConfig& c) { c.dt = NAN; });
  bad([](TrajectoryConfig& c) { c.x_init = 2.5; });
  bad([](TrajectoryConfig& c) { c.x_init = -3.0; });
  bad([](TrajectoryConfig& c) { c.stop.reflect_lo = -4.0; });
  bad([](TrajectoryConfig& c) { c.max_steps = 0; });
  bad([](TrajectoryConfig& c) { c.expected_mfpt = 0.0; });
  bad([](TrajectoryConfig& c) { c.max_steps = 1000; });
  auto ok = square_config(1);
  ok.max_steps = 1000;
  ok.horizon_override = true;
  CHECK_NOTHROW(validate(ok, f));
  // Without walls a run needs somewhere to stop.
  const auto open = OsmoticField::from_state(flat_state(-1.0, 2.0, 301), kDim);
  TrajectoryConfig c;
  c.x_init = 0.5;
  c.max_steps = 10;
  c.horizon_override = true;
  CHECK_THROWS_AS(validate(c, open), ConfigError);
  c.stop.reflect_hi = 1.5;
  CHECK_NOTHROW(validate(c, open));
  // Energy recording needs the potential.
  ok.record_stride = 10;
  CHECK_THROWS_AS(simulate_first_passage(ok, f), ConfigError);
}

TEST_CASE("single trajectories are deterministic") {
  const auto f = square_field();
  auto c = square_config(7);
  c.trajectory_id = 3;
  const auto a = simulate_first_passage(c, f);
  const auto b = simulate_first_passage(c, f);
  CHECK(a.steps == b.steps);
  CHECK(a.tau == b.tau);
  CHECK(a.tau == static_cast<double>(a.steps) * c.dt);
  CHECK_FALSE(a.timed_out);
  c.trajectory_id = 4;
  CHECK(simulate_first_passage(c, f).steps != a.steps);
  c.trajectory_id = 3;
  c.seed = 8;
  CHECK(simulate_first_passage(c, f).steps != a.steps);
}

TEST_CASE("timeouts are recorded") {
  const auto f = square_field();
  auto c = square_config(7);
  c.max_steps = 1001;
  c.horizon_override = true;
  const auto r = simulate_first_passage(c, f);
  CHECK(r.timed_out);
  CHECK(r.steps == 1001);
  EnsembleConfig e{c, 10, 1, simd::Isa::Scalar};
  const auto run = run_ensemble(e, f);
  for (const auto& rec : run.records) {
    CHECK(rec.timed_out);
    CHECK(rec.steps == 1001);
  }
  const auto ens = make_ensemble(run.records, "t");
  CHECK(ens.n == 0);
  CHECK(ens.timed_out == 10);
  CHECK(ens.timeout_warning);
}

TEST_CASE("ensembles do not depend on workers or ISA") {
  const auto f = square_field();
  EnsembleConfig e{square_config(21), 150, 1, simd::Isa::Scalar};
  e.base.trajectory_id = 500;
  const auto ref = run_ensemble(e, f);
  REQUIRE(ref.records.size() == 150);
  CHECK(ref.isa == simd::Isa::Scalar);
  std::vector<std::optional<simd::Isa>> isas{simd::Isa::Scalar, std::nullopt};
  if (simd::isa_supported(simd::Isa::Avx2)) isas.push_back(simd::Isa::Avx2);
  for (unsigned workers : {1u, 2u, 3u, 0u})
    for (const auto& isa : isas) {
      e.workers = workers;
      e.isa = isa;
      const auto r = run_ensemble(e, f);
      REQUIRE(r.records.size() == ref.records.size());
      for (std::size_t i = 0; i < r.records.size(); ++i) {
        CHECK(r.records[i].trajectory_id == 500 + i);
        CHECK(r.records[i].steps == ref.records[i].steps);
        CHECK(r.records[i].clamped == ref.records[i].clamped);
      }
    }
  // The ensemble kernel reproduces the reference integrator.
  for (std::size_t i : {0u, 77u, 149u}) {
    auto c = e.base;
    c.trajectory_id = 500 + i;
    CHECK(simulate_first_passage(c, f).steps == ref.records[i].steps);
  }
  e.n = 0;
  CHECK(run_ensemble(e, f).records.empty());
}

TEST_CASE("free diffusion reproduces the driftless mean time") {
  // Reflect at 0, absorb at 1, start near 0: tau = 1 for hbar = m = 1.
  const auto f = OsmoticField::from_state(flat_state(-1.0, 2.0, 301), kDim);
  TrajectoryConfig c;
  c.dt = 1e-4;
  c.seed = 5;
  c.x_init = 1e-3;
  c.stop = StopRule{1.0, 0.0, INFINITY};
  c.max_steps = 10000000;
  c.expected_mfpt = 1.0;
  const auto run = run_ensemble(EnsembleConfig{c, 2000, 0, std::nullopt}, f);
  const auto e = make_ensemble(run.records, "free");
  CHECK(e.timed_out == 0);
  CHECK(std::abs(e.mean - (1.0 - 1e-6)) < 3.0 * e.stderr_);
  CHECK(run.clamped_total == 0);
}

TEST_CASE("oscillator trajectory samples the ground-state density") {
  // u = -x makes the walk an Ornstein-Uhlenbeck process with variance 1/2.
  const auto f = OsmoticField::from_state(oscillator_ground(), kDim);
  TrajectoryConfig c;
  c.dt = 1e-3;
  c.seed = 11;
  c.x_init = 0.1;
  c.stop.reflect_hi = 10.0;
  c.max_steps = 10000000;
  c.record_stride = 2000;
  c.horizon_override = true;
  const auto r = simulate_first_passage(c, f, [](double x) { return 0.5 * x * x; });
  CHECK(r.timed_out);
  REQUIRE(r.energy.has_value());
  std::vector<double> xs = r.energy->positions;
  REQUIRE(xs.size() == 5000);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-xs[i]);
    d = std::max({d, std::abs(cdf - i / n), std::abs(cdf - (i + 1) / n)});
  }
  CHECK(d < 1.63 / std::sqrt(n));
  // Time-averaged energy equals the eigenvalue 1/2.
  CHECK(r.energy->mean == doctest::Approx(0.5).epsilon(0.03));
  CHECK(r.path.size() == 5000);
  CHECK(r.path[1].step == 2000);
  CHECK(r.path[1].t == doctest::Approx(2.0).epsilon(1e-12));
}
