#include "sqt/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "sqt/error.hpp"
#include "sqt/io.hpp"

namespace sqt {

namespace {

constexpr double kPi = constants::pi;

double kappa_of(double k0, double k) { return std::sqrt(std::max(0.0, k0 * k0 - k * k)); }

// Bisect to machine resolution; returns the midpoint of the final bracket.
template <class F>
double bisect_full(F f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Lowest genuine root of f on (eps, kmax). At a root the two terms of the
// condition cancel; across a pole they do not, so the residual is judged
// relative to the term magnitudes returned by `scale`.
template <class F, class S>
double lowest_root(F f, S scale, double kmax, double tol) {
  const int n = 10000;
  const double eps = kmax * 1e-9;
  double prev_k = eps, prev_f = f(eps);
  for (int i = 1; i <= n; ++i) {
    const double k = eps + (kmax - eps) * static_cast<double>(i) / n * (1.0 - 1e-12);
    const double fk = f(k);
    if ((fk > 0.0) != (prev_f > 0.0) || fk == 0.0) {
      const double r = bisect_full(f, prev_k, k);
      if (std::abs(f(r)) <= tol * std::max(1.0, scale(r))) return r;
    }
    prev_k = k;
    prev_f = fk;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// cosh(a s)/cosh(a t) and sinh(a s)/sinh(a t) for 0 <= s <= t, without overflow.
double cosh_ratio(double a, double s, double t) {
  return std::exp(a * (s - t)) * (1.0 + std::exp(-2.0 * a * s)) / (1.0 + std::exp(-2.0 * a * t));
}
double sinh_ratio(double a, double s, double t) {
  return std::exp(a * (s - t)) * (-std::expm1(-2.0 * a * s)) / (-std::expm1(-2.0 * a * t));
}

struct Sweep {
  std::vector<double> f;  // (V - E)/(hbar^2/2m)
  double h2 = 0.0;
};

Sweep make_sweep(const std::vector<double>& v, double E, double h2m, double h) {
  Sweep s;
  s.h2 = h * h;
  s.f.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s.f[i] = (v[i] - E) / h2m;
  return s;
}

// Number of sign changes of the outward Numerov solution over nodes 1..n-1.
int count_nodes(const Sweep& s) {
  const std::size_t n = s.f.size();
  const double c = s.h2 / 12.0;
  double pm = 0.0, p = 1e-30;
  int nodes = 0;
  double last = p;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double next = (2.0 * (1.0 + 5.0 * c * s.f[i]) * p - (1.0 - c * s.f[i - 1]) * pm) / (1.0 - c * s.f[i + 1]);
    pm = p;
    p = next;
    if (std::abs(p) > 1e150) {
      p *= 1e-150;
      pm *= 1e-150;
    }
    if (p != 0.0) {
      if ((p > 0.0) != (last > 0.0)) ++nodes;
      last = p;
    }
  }
  return nodes;
}

std::vector<double> sample(const std::function<double(double)>& V, const UniformGrid& g) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) v[i] = V(g.at(i));
  return v;
}

void check_problem(const NumerovProblem& prob) {
  if (prob.grid.n < 16 || !(prob.grid.hi > prob.grid.lo)) throw DomainError("Numerov grid needs at least 16 points");
  if (!prob.V) throw DomainError("Numerov problem has no potential");
}

bool grid_is_symmetric(const UniformGrid& g) {
  return std::abs(g.lo + g.hi) <= 1e-14 * std::max(std::abs(g.lo), std::abs(g.hi));
}

double energy_for_level(const std::vector<double>& v, const UniformGrid& g, const UnitSystem& u, int level) {
  const double h2m = u.hbar2_over_2m();
  const double h = g.step();
  double lo = *std::min_element(v.begin(), v.end());
  double hi = *std::max_element(v.begin(), v.end());
  if (count_nodes(make_sweep(v, lo, h2m, h)) > 0)
    throw DomainError("Numerov grid too coarse: spurious nodes below the potential minimum");
  double span = std::max(hi - lo, std::abs(hi) + 1.0);
  for (int guard = 0; count_nodes(make_sweep(v, hi, h2m, h)) <= level; ++guard) {
    if (guard > 200) throw NumericalError("could not bracket Numerov level " + std::to_string(level));
    hi += span;
    span *= 2.0;
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_nodes(make_sweep(v, mid, h2m, h)) > level)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double square_k0(const SquareDoubleWell& w, const UnitSystem& u) {
  return std::sqrt(w.V0 / u.hbar2_over_2m());
}

double square_even_condition(const SquareDoubleWell& w, const UnitSystem& u, double k) {
  const double kap = kappa_of(square_k0(w, u), k);
  const double L = w.well_width();
  return k / std::tan(k * L) + kap * std::tanh(0.5 * kap * w.d);
}

double square_odd_condition(const SquareDoubleWell& w, const UnitSystem& u, double k) {
  const double kap = kappa_of(square_k0(w, u), k);
  const double L = w.well_width();
  return kap * std::tan(k * L) + k * std::tanh(0.5 * kap * w.d);
}

namespace {

double even_root(const SquareDoubleWell& w, const UnitSystem& u, double k0, double kmax) {
  const double L = w.well_width();
  return lowest_root([&](double k) { return square_even_condition(w, u, k); },
                     [&](double k) { return std::abs(k / std::tan(k * L)) + kappa_of(k0, k); }, kmax, 1e-12);
}

}  // namespace

double solve_square_even(const SquareDoubleWell& w, const UnitSystem& u) {
  const double k0 = square_k0(w, u);
  const double k = even_root(w, u, k0, std::min(k0, kPi / w.well_width()));
  if (std::isnan(k)) throw NumericalError("no sub-barrier ground state");
  return k;
}

SquareLevels solve_square_levels(const SquareDoubleWell& w, const UnitSystem& u) {
  const double k0 = square_k0(w, u);
  const double kmax = std::min(k0, kPi / w.well_width());
  const double L = w.well_width();
  SquareLevels lv;
  lv.k_even = even_root(w, u, k0, kmax);
  lv.k_odd = lowest_root([&](double k) { return square_odd_condition(w, u, k); },
                         [&](double k) { return std::abs(kappa_of(k0, k) * std::tan(k * L)) + k; }, kmax, 1e-12);
  if (std::isnan(lv.k_even) || std::isnan(lv.k_odd)) throw NumericalError("no sub-barrier doublet");
  if (!(lv.k_even < lv.k_odd))
    throw NumericalError("doublet splitting is below double-precision resolution (kappa d too large)");
  return lv;
}

double square_psi(const SquareDoubleWell& w, const UnitSystem& u, double k, Parity parity, double x) {
  const double k0 = square_k0(w, u);
  const double kap = kappa_of(k0, k);
  const double L = w.well_width();
  const double half_d = 0.5 * w.d;
  const double s = std::abs(x);
  if (s > w.wall()) throw DomainError("infinite-wall region");
  double f;
  if (s < half_d) {
    f = std::sin(k * L) * (parity == Parity::Even ? cosh_ratio(kap, s, half_d) : sinh_ratio(kap, s, half_d));
  } else {
    f = std::sin(k * (w.wall() - s));
  }
  if (parity == Parity::Odd && x < 0.0) f = -f;
  return f;
}

BoundState square_bound_state(const SquareDoubleWell& w, const UnitSystem& u, double k, Parity parity,
                              std::size_t n_points) {
  if (n_points < 3) throw DomainError("square_bound_state needs at least 3 grid points");
  const double k0 = square_k0(w, u);
  const double kap = kappa_of(k0, k);
  const double L = w.well_width();
  const double half_d = 0.5 * w.d;
  // Slope match at +d/2, both sides normalised by the common value sin(kL).
  const double t = std::tanh(kap * half_d);
  const double barrier_slope = std::sin(k * L) * kap * (parity == Parity::Even ? t : 1.0 / t);
  const double well_slope = -k * std::cos(k * L);
  const double scale = std::max({std::abs(barrier_slope), std::abs(well_slope), 1e-300});
  const double jump = std::abs(barrier_slope - well_slope) / scale;
  if (!(jump <= 1e-8))
    throw NumericalError("k does not satisfy the matching condition: relative slope jump " + fmt17(jump));

  BoundState s;
  s.wavenumber = k;
  s.energy = u.hbar2_over_2m() * k * k;
  s.grid = UniformGrid{-w.wall(), w.wall(), n_points};
  s.parity = parity;
  s.hard_walls = true;
  s.psi.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) s.psi[i] = square_psi(w, u, k, parity, s.grid.at(i));
  s.psi.front() = 0.0;
  s.psi.back() = 0.0;
  std::vector<double> rho(n_points);
  for (std::size_t i = 0; i < n_points; ++i) rho[i] = s.psi[i] * s.psi[i];
  s.norm_check = trapezoid(rho, s.grid.step());
  const double inv = 1.0 / std::sqrt(s.norm_check);
  for (auto& p : s.psi) p *= inv;
  s.nodes = parity == Parity::Even ? 0 : 1;
  return s;
}

double numerov_energy(const NumerovProblem& prob, const UnitSystem& u, int level) {
  check_problem(prob);
  return energy_for_level(sample(prob.V, prob.grid), prob.grid, u, level);
}

BoundState numerov_bound_state(const NumerovProblem& prob, const UnitSystem& u, int level) {
  check_problem(prob);
  const auto& g = prob.grid;
  const std::size_t n = g.n;
  const double h = g.step();
  const double h2m = u.hbar2_over_2m();
  const auto v = sample(prob.V, g);
  const double E = energy_for_level(v, g, u, level);
  const Sweep sw = make_sweep(v, E, h2m, h);

  const double fmax = std::max(std::abs(*std::max_element(sw.f.begin(), sw.f.end())),
                               std::abs(*std::min_element(sw.f.begin(), sw.f.end())));
  if (!(sw.h2 * fmax < 0.1)) throw DomainError("Numerov grid too coarse: h^2 max|f| = " + fmt17(sw.h2 * fmax));

  // Match at the outermost classically allowed node on the right.
  std::size_t m = n - 3;
  while (m > 2 && v[m] > E) --m;
  m = std::clamp<std::size_t>(m, 2, n - 3);

  const double c = sw.h2 / 12.0;
  std::vector<double> psi(n, 0.0);
  psi[1] = 1e-30;
  for (std::size_t i = 1; i < m; ++i) {
    psi[i + 1] = (2.0 * (1.0 + 5.0 * c * sw.f[i]) * psi[i] - (1.0 - c * sw.f[i - 1]) * psi[i - 1]) /
                 (1.0 - c * sw.f[i + 1]);
    if (std::abs(psi[i + 1]) > 1e150)
      for (std::size_t j = 0; j <= i + 1; ++j) psi[j] *= 1e-150;
  }
  std::vector<double> in(n, 0.0);
  in[n - 2] = 1e-30;
  for (std::size_t i = n - 2; i > m; --i) {
    in[i - 1] = (2.0 * (1.0 + 5.0 * c * sw.f[i]) * in[i] - (1.0 - c * sw.f[i + 1]) * in[i + 1]) /
                (1.0 - c * sw.f[i - 1]);
    if (std::abs(in[i - 1]) > 1e150)
      for (std::size_t j = i - 1; j < n; ++j) in[j] *= 1e-150;
  }
  if (in[m] == 0.0 || psi[m] == 0.0) throw NumericalError("Numerov matching point sits on a node");
  const double ratio = psi[m] / in[m];
  for (std::size_t i = m + 1; i < n; ++i) psi[i] = in[i] * ratio;

  BoundState s;
  s.energy = E;
  s.wavenumber = std::numeric_limits<double>::quiet_NaN();
  s.grid = g;
  s.hard_walls = prob.hard_walls;
  s.parity = (level % 2 == 0) ? Parity::Even : Parity::Odd;

  if (prob.symmetric && grid_is_symmetric(g)) {
    const double sgn = s.parity == Parity::Even ? 1.0 : -1.0;
    std::vector<double> sym(n);
    for (std::size_t i = 0; i < n; ++i) sym[i] = 0.5 * (psi[i] + sgn * psi[n - 1 - i]);
    if (s.parity == Parity::Odd && n % 2 == 1) sym[n / 2] = 0.0;
    psi.swap(sym);
  }

  double right = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (g.at(i) > 0.0) right += psi[i];
  if (right < 0.0)
    for (auto& p : psi) p = -p;

  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = psi[i] * psi[i];
  s.norm_check = trapezoid(rho, h);
  if (!(s.norm_check > 0.0) || !std::isfinite(s.norm_check)) throw NumericalError("Numerov state has no norm");
  const double inv = 1.0 / std::sqrt(s.norm_check);
  double pmax = 0.0;
  for (auto& p : psi) {
    p *= inv;
    pmax = std::max(pmax, std::abs(p));
  }

  int nodes = 0;
  double last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(psi[i]) <= 1e-10 * pmax) continue;
    if (last != 0.0 && (psi[i] > 0.0) != (last > 0.0)) ++nodes;
    last = psi[i];
  }
  s.nodes = nodes;
  if (nodes != level)
    throw NumericalError("Numerov node count " + std::to_string(nodes) + " does not match level " +
                         std::to_string(level));
  if (!prob.hard_walls && (std::abs(psi[1]) > 1e-8 * pmax || std::abs(psi[n - 2]) > 1e-8 * pmax))
    throw NumericalError("grid too small: wavefunction tails do not decay below 1e-8 of the maximum");
  s.psi = std::move(psi);
  return s;
}

UniformGrid default_rm_grid(const RosenMorseDouble& p, const UnitSystem& u, std::size_t n_points) {
  const double e_ref = evaluate(p, 0.0);
  if (!(e_ref < p.A)) throw DomainError("Rosen-Morse barrier top is not below the asymptote");
  const auto g = rm_derived_geometry(p);
  const double h2m = u.hbar2_over_2m();
  // Outer turning point at the barrier-top energy bounds every sub-barrier state.
  double c = g.x0;
  while (evaluate(p, c) < e_ref) c += p.d * 1e-3;
  // Walk outward until the WKB decay exponent from c reaches 20 (e^-20 < 1e-8).
  const double dx = p.d * 1e-3;
  double phi = 0.0, x = c;
  while (phi < 20.0) {
    const double k1 = std::sqrt(std::max(0.0, evaluate(p, x) - e_ref) / h2m);
    const double k2 = std::sqrt(std::max(0.0, evaluate(p, x + dx) - e_ref) / h2m);
    phi += 0.5 * dx * (k1 + k2);
    x += dx;
  }
  return UniformGrid{-x, x, n_points};
}

BoundState numerov_bound_state(const RosenMorseDouble& p, const UnitSystem& u, RmLevel which,
                               std::size_t n_points) {
  NumerovProblem prob;
  prob.V = [p](double x) { return evaluate(p, x); };
  prob.grid = default_rm_grid(p, u, n_points);
  return numerov_bound_state(prob, u, static_cast<int>(which));
}

std::vector<double> rm_levels(const RosenMorseDouble& p, const UnitSystem& u, int count, std::size_t n_points) {
  const auto g = default_rm_grid(p, u, n_points);
  const auto v = sample([p](double x) { return evaluate(p, x); }, g);
  std::vector<double> e(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) e[static_cast<std::size_t>(i)] = energy_for_level(v, g, u, i);
  return e;
}

SpectrumPair spectrum_pair(double e0, double e1, const UnitSystem& u) {
  if (!(e1 > e0)) throw DomainError("spectrum pair needs e1 > e0");
  SpectrumPair s;
  s.e0 = e0;
  s.e1 = e1;
  s.delta_e = e1 - e0;
  s.period = 2.0 * kPi * u.hbar / s.delta_e;
  return s;
}

double expectation_energy(const BoundState& s, const std::function<double(double)>& V, const UnitSystem& u) {
  const std::size_t n = s.psi.size();
  const double h = s.grid.step();
  const double wall_sign = s.hard_walls ? -1.0 : 0.0;
  auto at = [&](long i) -> double {
    if (i < 0) return wall_sign * s.psi[static_cast<std::size_t>(-i)];
    if (i >= static_cast<long>(n)) return wall_sign * s.psi[static_cast<std::size_t>(2 * (static_cast<long>(n) - 1) - i)];
    return s.psi[static_cast<std::size_t>(i)];
  };
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const long i = static_cast<long>(j);
    const double d2 = (-at(i - 2) + 16.0 * at(i - 1) - 30.0 * at(i) + 16.0 * at(i + 1) - at(i + 2)) / (12.0 * h * h);
    const double x = s.grid.at(j);
    double vx = 0.0;
    if (!(s.hard_walls && (j == 0 || j + 1 == n))) vx = V(x);
    num += s.psi[j] * (-u.hbar2_over_2m() * d2 + vx * s.psi[j]);
    den += s.psi[j] * s.psi[j];
  }
  return num / den;
}

void write_bound_state_csv(std::ostream& os, const BoundState& s, const std::function<double(double)>& V) {
  os << "# schema: sqt.bound_state/1\n";
  os << "# energy=" << fmt17(s.energy) << " parity=" << (s.parity == Parity::Even ? "even" : "odd") << "\n";
  os << "x,psi,V\n";
  for (std::size_t i = 0; i < s.psi.size(); ++i) {
    const double x = s.grid.at(i);
    double vx;
    if (s.hard_walls && (i == 0 || i + 1 == s.psi.size()))
      vx = std::numeric_limits<double>::infinity();
    else
      vx = V(x);
    os << fmt17(x) << ',' << fmt17(s.psi[i]) << ',' << fmt17(vx) << '\n';
  }
}

}  // namespace sqt
