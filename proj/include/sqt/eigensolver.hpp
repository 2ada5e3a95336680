#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqt/numerics.hpp"
#include "sqt/potentials.hpp"
#include "sqt/units.hpp"

namespace sqt {

enum class Parity { Even, Odd };

struct BoundState {
  double energy = 0.0;
  double wavenumber = 0.0;  // square well only, NaN otherwise
  UniformGrid grid;
  std::vector<double> psi;
  Parity parity = Parity::Even;
  double norm_check = 0.0;
  int nodes = 0;
  bool hard_walls = false;
};

struct SpectrumPair {
  double e0;
  double e1;
  double delta_e;
  double period;
};

struct SquareLevels {
  double k_even;
  double k_odd;
};

// Residuals of the even and odd matching conditions.
double square_even_condition(const SquareDoubleWell& w, const UnitSystem& u, double k);
double square_odd_condition(const SquareDoubleWell& w, const UnitSystem& u, double k);
double square_k0(const SquareDoubleWell& w, const UnitSystem& u);

SquareLevels solve_square_levels(const SquareDoubleWell& w, const UnitSystem& u);
// Even root alone; stays usable when the doublet splitting underflows.
double solve_square_even(const SquareDoubleWell& w, const UnitSystem& u);
BoundState square_bound_state(const SquareDoubleWell& w, const UnitSystem& u, double k, Parity parity,
                              std::size_t n_points = 8001);
// Closed-form psi (unnormalized amplitude, sin branch = 1) at x.
double square_psi(const SquareDoubleWell& w, const UnitSystem& u, double k, Parity parity, double x);

struct NumerovProblem {
  std::function<double(double)> V;
  UniformGrid grid;
  bool hard_walls = false;  // psi is pinned to zero at both grid ends by walls
  bool symmetric = true;    // V(x) = V(-x) on a grid symmetric about 0
};

// Energy of level n (0-based, counting nodes) by Sturm bisection.
double numerov_energy(const NumerovProblem& prob, const UnitSystem& u, int level);
BoundState numerov_bound_state(const NumerovProblem& prob, const UnitSystem& u, int level);

enum class RmLevel { Ground = 0, FirstExcited = 1, SecondPairLower = 2, SecondPairUpper = 3 };

// Default grid: wide enough that a state of energy e_ref decays below 1e-8 of its maximum.
UniformGrid default_rm_grid(const RosenMorseDouble& p, const UnitSystem& u, std::size_t n_points = 8001);
BoundState numerov_bound_state(const RosenMorseDouble& p, const UnitSystem& u, RmLevel which,
                               std::size_t n_points = 8001);
// The four lowest levels on the default grid.
std::vector<double> rm_levels(const RosenMorseDouble& p, const UnitSystem& u, int count = 4,
                              std::size_t n_points = 8001);

SpectrumPair spectrum_pair(double e0, double e1, const UnitSystem& u);

// <psi|H|psi> by finite differences on the state's grid.
double expectation_energy(const BoundState& s, const std::function<double(double)>& V, const UnitSystem& u);

void write_bound_state_csv(std::ostream& os, const BoundState& s, const std::function<double(double)>& V);

}  // namespace sqt
