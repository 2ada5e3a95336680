#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sqt/eigensolver.hpp"
#include "sqt/error.hpp"

using namespace sqt;

namespace {
const UnitSystem kDim = UnitSystem::dimensionless();
const SquareDoubleWell kWell = SquareDoubleWell::make(6.0, 2.0, 2.0);
const RosenMorseDouble kAmmonia = RosenMorseDouble::make(398.0, 2810.0, 0.17, 2.22);
UnitSystem ammonia_units() {
  return UnitSystem::spectroscopic(reduced_mass(constants::mass_hydrogen_u, constants::mass_nitrogen_u));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_parity(const BoundState& s, double rel) {
  const double sign = s.parity == Parity::Even ? 1.0 : -1.0;
  const double m = max_abs(s.psi);
  const std::size_t n = s.psi.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(s.psi[i] - sign * s.psi[n - 1 - i]));
  CHECK(worst <= rel * m);
}
}  // namespace

TEST_CASE("square-well roots") {
  const auto lv = solve_square_levels(kWell, kDim);
  const double L = kWell.well_width();
  // Bisection oracle on the even condition, frozen.
  CHECK(lv.k_even == doctest::Approx(1.2216594115691937).epsilon(1e-13));
  CHECK(lv.k_odd == doctest::Approx(1.253519335014562).epsilon(1e-13));
  CHECK(lv.k_even > constants::pi / (2.0 * L));
  CHECK(lv.k_even < constants::pi / L);
  CHECK(lv.k_even < lv.k_odd);
  CHECK(std::abs(square_even_condition(kWell, kDim, lv.k_even)) <= 1e-12);
  CHECK(std::abs(square_odd_condition(kWell, kDim, lv.k_odd)) <= 1e-12);
  CHECK(0.5 * lv.k_odd * lv.k_odd < kWell.V0);
  CHECK(square_k0(kWell, kDim) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("square-well residual property over a parameter sweep") {
  // kappa d stays below ~30 so the doublet splitting is resolvable in doubles.
  for (double d : {1.0, 2.0, 3.0, 4.0})
    for (double v0 : {2.0, 3.0, 3.5, 10.0, 20.0}) {
      const auto w = SquareDoubleWell::make(6.0, d, v0);
      const auto lv = solve_square_levels(w, kDim);
      CHECK(std::abs(square_even_condition(w, kDim, lv.k_even)) <= 1e-12);
      CHECK(std::abs(square_odd_condition(w, kDim, lv.k_odd)) <= 1e-12);
      CHECK(lv.k_even < lv.k_odd);
    }
}

TEST_CASE("square-well limits") {
  SUBCASE("high barrier: both roots approach pi/L from below") {
    const double kinf = constants::pi / 2.0;
    double prev_gap = INFINITY, prev_k = 0.0;
    for (double v0 : {10.0, 30.0, 100.0}) {
      const auto lv = solve_square_levels(SquareDoubleWell::make(6.0, 2.0, v0), kDim);
      CHECK(lv.k_odd < kinf);
      CHECK(lv.k_even > prev_k);
      CHECK(lv.k_odd - lv.k_even < prev_gap);
      prev_gap = lv.k_odd - lv.k_even;
      prev_k = lv.k_even;
    }
    CHECK(prev_k == doctest::Approx(kinf).epsilon(0.05));
    CHECK(prev_gap < 1e-10);
  }
  SUBCASE("unresolvable splitting is reported") {
    CHECK_THROWS_AS(solve_square_levels(SquareDoubleWell::make(6.0, 2.0, 1e4), kDim), NumericalError);
  }
  SUBCASE("thin barrier: single well of width b") {
    const auto w = SquareDoubleWell::make(6.0, 1e-6, 2.0);
    const auto lv = solve_square_levels(w, kDim);
    CHECK(lv.k_even == doctest::Approx(constants::pi / 6.0).epsilon(1e-5));
  }
  SUBCASE("no sub-barrier doublet") {
    CHECK_THROWS_AS(solve_square_levels(SquareDoubleWell::make(6.0, 0.5, 0.2), kDim), NumericalError);
  }
}

TEST_CASE("square-well bound states") {
  const auto lv = solve_square_levels(kWell, kDim);
  const double L = kWell.well_width();
  SUBCASE("even state") {
    const auto s = square_bound_state(kWell, kDim, lv.k_even, Parity::Even);
    CHECK(s.psi.front() == 0.0);
    CHECK(s.psi.back() == 0.0);
    CHECK(s.grid.lo == -3.0);
    CHECK(s.grid.hi == 3.0);
    CHECK(trapezoid([&] {
            auto p = s.psi;
            for (auto& v : p) v *= v;
            return p;
          }(),
                    s.grid.step()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.nodes == 0);
    CHECK(s.energy == doctest::Approx(0.5 * lv.k_even * lv.k_even).epsilon(1e-15));
    CHECK(s.energy == doctest::Approx(0.74622586).epsilon(1e-7));
    check_parity(s, 1e-10);
    // Both branches agree at the barrier edge; the origin holds C = sin(kL)/cosh(kappa d/2).
    const double kappa = std::sqrt(4.0 - lv.k_even * lv.k_even);
    const double edge_in = square_psi(kWell, kDim, lv.k_even, Parity::Even, 1.0 - 1e-12);
    const double edge_out = square_psi(kWell, kDim, lv.k_even, Parity::Even, 1.0 + 1e-12);
    CHECK(edge_in == doctest::Approx(edge_out).epsilon(1e-10));
    CHECK(edge_out == doctest::Approx(std::sin(lv.k_even * L)).epsilon(1e-10));
    CHECK(square_psi(kWell, kDim, lv.k_even, Parity::Even, 0.0) ==
          doctest::Approx(std::sin(lv.k_even * L) / std::cosh(kappa)).epsilon(1e-14));
  }
  SUBCASE("odd state") {
    const auto s = square_bound_state(kWell, kDim, lv.k_odd, Parity::Odd);
    CHECK(s.psi[s.psi.size() / 2] == 0.0);
    CHECK(square_psi(kWell, kDim, lv.k_odd, Parity::Odd, 0.0) == 0.0);
    CHECK(s.nodes == 1);
    check_parity(s, 1e-10);
    const double a = square_psi(kWell, kDim, lv.k_odd, Parity::Odd, 1.0 - 1e-12);
    const double b = square_psi(kWell, kDim, lv.k_odd, Parity::Odd, 1.0 + 1e-12);
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
    CHECK(a > 0.0);
  }
  SUBCASE("wrong wavenumber is rejected") {
    CHECK_THROWS_AS(square_bound_state(kWell, kDim, 1.1, Parity::Even), NumericalError);
    CHECK_THROWS_AS(square_bound_state(kWell, kDim, lv.k_even, Parity::Odd), NumericalError);
  }
}

TEST_CASE("Numerov validation") {
  SUBCASE("harmonic oscillator") {
    NumerovProblem p{[](double x) { return 0.5 * x * x; }, UniformGrid{-10.0, 10.0, 4001}, false, true};
    CHECK(numerov_energy(p, kDim, 0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(numerov_energy(p, kDim, 1) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(numerov_energy(p, kDim, 2) == doctest::Approx(2.5).epsilon(1e-6));
    const auto g = numerov_bound_state(p, kDim, 0);
    const auto e = numerov_bound_state(p, kDim, 1);
    CHECK(g.nodes == 0);
    CHECK(g.parity == Parity::Even);
    CHECK(e.nodes == 1);
    CHECK(e.parity == Parity::Odd);
    check_parity(g, 1e-10);
    check_parity(e, 1e-10);
    CHECK(expectation_energy(g, p.V, kDim) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(expectation_energy(e, p.V, kDim) == doctest::Approx(1.5).epsilon(1e-6));
  }
  SUBCASE("infinite well") {
    NumerovProblem p{[](double) { return 0.0; }, UniformGrid{-0.5, 0.5, 2001}, true, true};
    for (int n = 1; n <= 4; ++n) {
      const double exact = n * n * constants::pi * constants::pi / 2.0;
      CHECK(numerov_energy(p, kDim, n - 1) == doctest::Approx(exact).epsilon(1e-6));
    }
    const auto s = numerov_bound_state(p, kDim, 0);
    CHECK(s.psi.front() == 0.0);
    CHECK(s.psi.back() == 0.0);
  }
  SUBCASE("grid too small") {
    NumerovProblem p{[](double x) { return 0.5 * x * x; }, UniformGrid{-2.0, 2.0, 2001}, false, true};
    CHECK_THROWS_AS(numerov_bound_state(p, kDim, 0), NumericalError);
  }
  SUBCASE("grid too coarse") {
    NumerovProblem p{[](double x) { return 0.5 * x * x; }, UniformGrid{-10.0, 10.0, 41}, false, true};
    CHECK_THROWS_AS(numerov_bound_state(p, kDim, 0), DomainError);
  }
}

TEST_CASE("Rosen-Morse ammonia levels") {
  const auto u = ammonia_units();
  const auto e = rm_levels(kAmmonia, u, 4);
  // Frozen values; a separate Python prototype agreed to the printed digits.
  CHECK(e[0] == doctest::Approx(-2126.158385).epsilon(1e-9));
  CHECK(e[1] == doctest::Approx(-2125.376093).epsilon(1e-9));
  CHECK(e[2] == doctest::Approx(-1000.859157).epsilon(1e-9));
  CHECK(e[3] == doctest::Approx(-954.7223534).epsilon(1e-9));
  CHECK(e[1] - e[0] == doctest::Approx(0.78229).epsilon(1e-4));

  SUBCASE("refinement") {
    const auto fine = rm_levels(kAmmonia, u, 2, 16001);
    CHECK(fine[0] == doctest::Approx(e[0]).epsilon(1e-8));
    CHECK(fine[1] == doctest::Approx(e[1]).epsilon(1e-8));
  }
  SUBCASE("states") {
    const auto g = numerov_bound_state(kAmmonia, u, RmLevel::Ground);
    const auto x = numerov_bound_state(kAmmonia, u, RmLevel::FirstExcited);
    CHECK(g.energy == e[0]);
    CHECK(x.energy == e[1]);
    CHECK(g.nodes == 0);
    CHECK(x.nodes == 1);
    CHECK(g.parity == Parity::Even);
    CHECK(x.parity == Parity::Odd);
    CHECK(std::abs(x.psi[x.psi.size() / 2]) <= 1e-10 * max_abs(x.psi));
    check_parity(g, 1e-10);
    check_parity(x, 1e-10);
    auto rho = g.psi;
    for (auto& v : rho) v *= v;
    CHECK(trapezoid(rho, g.grid.step()) == doctest::Approx(1.0).epsilon(1e-8));
    // Tails closed below 1e-8 of the maximum.
    CHECK(std::abs(g.psi[1]) < 1e-8 * max_abs(g.psi));
    const auto V = [](double y) { return evaluate(kAmmonia, y); };
    CHECK(expectation_energy(g, V, u) == doctest::Approx(g.energy).epsilon(1e-6));
    CHECK(expectation_energy(x, V, u) == doctest::Approx(x.energy).epsilon(1e-6));
  }
}

TEST_CASE("spectrum pair") {
  const auto d = spectrum_pair(0.0, 2.0 * constants::pi, kDim);
  CHECK(d.period == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.delta_e == 2.0 * constants::pi);
  const auto u = UnitSystem::spectroscopic(1.0);
  const auto s = spectrum_pair(-1.0, -0.2, u);
  CHECK(s.delta_e == -0.2 - -1.0);
  CHECK(s.period == doctest::Approx(41.7).epsilon(1e-3));
  CHECK(1e3 / s.period == doctest::Approx(23.98).epsilon(1e-3));
  CHECK(s.period == 2.0 * constants::pi * u.hbar / s.delta_e);
  CHECK_THROWS_AS(spectrum_pair(1.0, 1.0, kDim), DomainError);
  CHECK_THROWS_AS(spectrum_pair(1.0, 0.5, kDim), DomainError);
}

TEST_CASE("bound-state CSV") {
  const auto lv = solve_square_levels(kWell, kDim);
  const auto s = square_bound_state(kWell, kDim, lv.k_even, Parity::Even, 11);
  std::ostringstream os;
  write_bound_state_csv(os, s, [](double x) { return evaluate(kWell, x); });
  const std::string t = os.str();
  CHECK(t.rfind("# schema: sqt.bound_state/1\n", 0) == 0);
  CHECK(t.find("x,psi,V\n") != std::string::npos);
  CHECK(std::count(t.begin(), t.end(), '\n') == 14);
  CHECK(t.find("# energy=") != std::string::npos);
}
