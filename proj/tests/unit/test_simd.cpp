#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "sqt/dynamics.hpp"
#include "sqt/error.hpp"
#include "sqt/simd/kernel.hpp"
#include "sqt/simd/normal.hpp"
#include "sqt/simd/philox.hpp"

using namespace sqt;
using namespace sqt::simd;

namespace {
const UnitSystem kDim = UnitSystem::dimensionless();

OsmoticField square_field(double v0 = 2.0) {
  const auto w = SquareDoubleWell::make(6.0, 2.0, v0);
  return OsmoticField::square_well(w, kDim, solve_square_levels(w, kDim).k_even);
}

WalkParams params(const OsmoticField& f, double dt, double x0, double absorb, std::uint64_t max_steps,
                  std::uint64_t seed) {
  WalkParams p;
  p.dt = dt;
  p.noise = std::sqrt(f.diffusion() * dt);
  p.cap = drift_cap(f.diffusion(), dt);
  p.reflect_lo = f.lo();
  p.reflect_hi = f.hard_walls() ? f.hi() : INFINITY;
  p.absorb_at = absorb;
  p.x_init = x0;
  p.max_steps = max_steps;
  p.seed = seed;
  return p;
}

std::vector<WalkOutcome> run(Isa isa, const DriftTable& t, const WalkParams& p, std::uint64_t first, std::size_t n) {
  std::vector<WalkOutcome> out(n);
  walk(isa, t, p, first, n, out.data());
  return out;
}

void check_same(const std::vector<WalkOutcome>& a, const std::vector<WalkOutcome>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CAPTURE(i);
    CHECK(a[i].steps == b[i].steps);
    CHECK(a[i].clamped == b[i].clamped);
    CHECK(a[i].status == b[i].status);
  }
}

bool have_avx2() { return isa_supported(Isa::Avx2); }
}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Philox counter layout") {
  const auto a = philox_draw(0x0123456789abcdefULL, 0x1111222233334444ULL, 0x5555666677778888ULL);
  const auto b = philox4x32_10({0x77778888, 0x55556666, 0x33334444, 0x11112222}, {0x89abcdef, 0x01234567});
  CHECK(a == b);
}

TEST_CASE("portable log") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = uniform52(static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()));
    const double x = 1.0 - u;  // (0, 1]
    const double ref = std::log(x);
    worst = std::max(worst, std::abs(log_portable(x) - ref) / std::max(1.0, std::abs(ref)));
  }
  CHECK(worst < 1e-15);
  CHECK(log_portable(1.0) == 0.0);
  CHECK(log_portable(0x1p-52) == doctest::Approx(-52.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("portable sincos") {
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = i / 100000.0;
    double s, c;
    sincos_2pi(u, s, c);
    worst = std::max({worst, std::abs(s - std::sin(2.0 * constants::pi * u)),
                      std::abs(c - std::cos(2.0 * constants::pi * u))});
  }
  CHECK(worst < 4e-15);
}

TEST_CASE("uniform52 range") {
  CHECK(uniform52(0, 0) == 0.0);
  CHECK(uniform52(0xffffffff, 0xffffffff) == 1.0 - 0x1p-52);
}

TEST_CASE("normal pairs have unit moments") {
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0, cross = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    double a, b;
    normal_pair(42, 5, static_cast<std::uint64_t>(i), a, b);
    s1 += a + b;
    s2 += a * a + b * b;
    s4 += a * a * a * a + b * b * b * b;
    cross += a * b;
  }
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
  CHECK(std::abs(cross / (n / 2)) < 5.0 / std::sqrt(n / 2));
}

TEST_CASE("drift tables reproduce the field") {
  SUBCASE("square well, closed form") {
    const auto f = square_field();
    const auto t = f.drift_table(1e300);
    double worst = 0.0;
    for (double x = -2.99; x < 2.99; x += 1e-3) {
      const double u = f.velocity(x);
      worst = std::max(worst, std::abs(t.eval(x) - u) / std::max(1.0, std::abs(u)));
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("capped cells saturate") {
    const auto f = square_field();
    const double cap = 50.0;
    const auto t = f.drift_table(cap);
    CHECK(t.eval(-3.0 + 1e-4) == doctest::Approx(cap));
    CHECK(t.eval(3.0 - 1e-4) == doctest::Approx(-cap));
    CHECK(t.eval(-10.0) == doctest::Approx(cap));
    CHECK(t.eval(10.0) == doctest::Approx(-cap));
  }
}

TEST_CASE("ISA selection") {
  CHECK(isa_supported(Isa::Scalar));
  CHECK(parse_isa("scalar") == Isa::Scalar);
  CHECK(parse_isa("avx2") == Isa::Avx2);
  CHECK_THROWS_AS(parse_isa("sse9"), ConfigError);
  CHECK(std::string(isa_name(Isa::Avx2)) == "avx2");
  ::setenv("SQT_FORCE_ISA", "scalar", 1);
  CHECK(detect_isa() == Isa::Scalar);
  ::setenv("SQT_FORCE_ISA", "bogus", 1);
  CHECK_THROWS_AS(detect_isa(), ConfigError);
  ::unsetenv("SQT_FORCE_ISA");
  CHECK(detect_isa() == (have_avx2() ? Isa::Avx2 : Isa::Scalar));
}

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
  if (!have_avx2()) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  SUBCASE("square well, hard walls, absorption") {
    const auto f = square_field();
    const auto p = params(f, 1e-3, -2.0, 2.0, 2000000, 11);
    const auto t = f.drift_table(p.cap);
    check_same(run(Isa::Scalar, t, p, 1000, 37), run(Isa::Avx2, t, p, 1000, 37));
  }
  SUBCASE("coarse step exercises the clamp") {
    const auto f = square_field();
    // A table built without the cap lets the kernel clamp near the walls.
    const auto p = params(f, 0.05, -2.0, 2.0, 2000000, 12);
    const auto t = f.drift_table(1e300);
    const auto a = run(Isa::Scalar, t, p, 0, 64);
    check_same(a, run(Isa::Avx2, t, p, 0, 64));
    std::uint64_t clamped = 0;
    for (const auto& o : a) clamped += o.clamped;
    CHECK(clamped > 0);
  }
  SUBCASE("timeouts with an odd step budget") {
    const auto f = square_field();
    for (std::uint64_t max_steps : {0ULL, 1ULL, 2ULL, 1001ULL, 20000ULL}) {
      CAPTURE(max_steps);
      const auto p = params(f, 1e-3, -2.0, -1.9, max_steps, 13);
      const auto t = f.drift_table(p.cap);
      const auto a = run(Isa::Scalar, t, p, 5, 23);
      check_same(a, run(Isa::Avx2, t, p, 5, 23));
      for (const auto& o : a) {
        CHECK(o.steps <= max_steps);
        if (o.status == kTimedOut) CHECK(o.steps == max_steps);
      }
    }
  }
  SUBCASE("start on the absorbing side stops after one step") {
    const auto f = square_field();
    const auto p = params(f, 1e-3, 0.5, 0.4, 100, 14);
    const auto t = f.drift_table(p.cap);
    const auto a = run(Isa::Scalar, t, p, 0, 9);
    check_same(a, run(Isa::Avx2, t, p, 0, 9));
  }
  SUBCASE("grid-interpolated ammonia field") {
    const auto u = UnitSystem::spectroscopic(reduced_mass(constants::mass_hydrogen_u, constants::mass_nitrogen_u));
    const auto pot = RosenMorseDouble::make(398.0, 2810.0, 0.17, 2.22);
    const auto s = numerov_bound_state(pot, u, RmLevel::Ground);
    const auto tp = turning_points(pot, s.energy);
    const auto f = OsmoticField::from_state(s, u);
    const auto p = params(f, 1e-5, -tp.b_inner, tp.b_inner, 50000000, 15);
    const auto t = f.drift_table(p.cap);
    check_same(run(Isa::Scalar, t, p, 77, 13), run(Isa::Avx2, t, p, 77, 13));
  }
  SUBCASE("non-finite drift is reported identically") {
    DriftTable t;
    t.lo = 0.0;
    t.h = 1.0;
    t.inv_h = 1.0;
    t.cells = 8;
    t.coef.assign(32, 0.0);
    for (int c = 0; c < 8; ++c) t.coef[4 * c] = 1.0;
    t.coef[4 * 3] = NAN;
    WalkParams p;
    p.dt = 1.0;
    p.noise = 1e-9;
    p.cap = INFINITY;  // a finite cap would absorb the NaN
    p.reflect_lo = -1.0;
    p.reflect_hi = INFINITY;
    p.absorb_at = 100.0;
    p.x_init = 0.5;
    p.max_steps = 1000;
    p.seed = 1;
    const auto a = run(Isa::Scalar, t, p, 0, 6);
    check_same(a, run(Isa::Avx2, t, p, 0, 6));
    for (const auto& o : a) {
      CHECK(o.status == kNonFinite);
      CHECK(o.steps == 4);
    }
  }
}

TEST_CASE("kernel matches the single-trajectory reference") {
  const auto f = square_field();
  TrajectoryConfig c;
  c.dt = 1e-3;
  c.seed = 99;
  c.x_init = -2.0;
  c.stop.absorb_at = 2.0;
  c.max_steps = 2000000;
  c.horizon_override = true;
  const auto p = params(f, c.dt, c.x_init, c.stop.absorb_at, c.max_steps, c.seed);
  const auto t = f.drift_table(p.cap);
  const auto a = run(Isa::Scalar, t, p, 0, 8);
  for (std::uint64_t i = 0; i < 8; ++i) {
    c.trajectory_id = i;
    const auto r = simulate_first_passage(c, f);
    CHECK(r.steps == a[i].steps);
    CHECK(r.clamped == a[i].clamped);
    CHECK(r.timed_out == (a[i].status == kTimedOut));
  }
}
