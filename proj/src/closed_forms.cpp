#include "sqt/closed_forms.hpp"

#include <algorithm>
#include <cmath>

#include "sqt/eigensolver.hpp"
#include "sqt/error.hpp"
#include "sqt/numerics.hpp"

namespace sqt {

namespace {
constexpr double kPi = constants::pi;
}

SquareWellClosedForm SquareWellClosedForm::make(const SquareDoubleWell& w, const UnitSystem& u, double k) {
  SquareWellClosedForm cf;
  cf.well = w;
  cf.k = k;
  cf.k0 = square_k0(w, u);
  if (!(k > 0.0 && k < cf.k0)) throw DomainError("closed form needs 0 < k < k0 (E below the barrier)");
  cf.kappa = std::sqrt(cf.k0 * cf.k0 - k * k);
  cf.hbar = u.hbar;
  cf.mass = u.mass;
  if (std::abs(square_even_condition(w, u, k)) > 1e-10 * std::max(1.0, cf.k0))
    throw DomainError("k is not a root of the even matching condition");
  return cf;
}

double dsw_mean_tau(const SquareWellClosedForm& cf) {
  const double k = cf.k, kap = cf.kappa, k0sq = cf.k0 * cf.k0, d = cf.well.d, L = cf.well.well_width();
  const double r = k0sq / (2.0 * k * k);
  const double bracket = 0.5 * d + L * (1.0 - r + r * std::cosh(kap * d)) + r * std::sinh(kap * d) / kap;
  return 2.0 * cf.mass / cf.hbar * std::tanh(0.5 * kap * d) / kap * bracket;
}

double dsw_mean_tau_high_barrier(const SquareWellClosedForm& cf) {
  const double L = cf.well.well_width();
  return cf.mass * L * cf.k0 / (2.0 * cf.hbar * cf.k * cf.k) * std::exp(cf.k0 * cf.well.d);
}

SplittingPeriod dsw_splitting_and_period(const SquareWellClosedForm& cf) {
  const double L = cf.well.well_width();
  SplittingPeriod s;
  s.delta_e = 4.0 * cf.hbar * cf.hbar * cf.k * cf.k / (L * cf.kappa * cf.mass) * std::exp(-cf.kappa * cf.well.d);
  s.period = 2.0 * kPi * cf.hbar / s.delta_e;
  return s;
}

namespace {

// int_0^{sqrt(len)} 2 s / k(x0 + dir s^2) ds: removes the 1/sqrt singularity at x0.
double singular_half(const std::function<double(double)>& V, double h2m, double E, double x0, double dir,
                     double len) {
  const double eps = 1e-6 * len;
  const double slope = std::abs(V(x0 + dir * eps) - V(x0)) / eps;
  const double limit = slope > 0.0 ? 2.0 * std::sqrt(h2m / slope) : 0.0;
  auto f = [&](double s) {
    const double de = E - V(x0 + dir * s * s);
    if (!(de > 0.0)) return limit;
    return 2.0 * s / std::sqrt(de / h2m);
  };
  return integrate(f, 0.0, std::sqrt(len), 1e-12);
}

}  // namespace

double classical_period(const std::function<double(double)>& V, const UnitSystem& u, double E, double left,
                        double right) {
  if (!(right > left)) throw DomainError("classical period needs left < right");
  const double h2m = u.hbar2_over_2m();
  const double half = 0.5 * (right - left);
  const double I = singular_half(V, h2m, E, left, 1.0, half) + singular_half(V, h2m, E, right, -1.0, half);
  return 2.0 * u.mass / u.hbar * I;
}

double barrier_integral(const std::function<double(double)>& V, const UnitSystem& u, double E, double b) {
  if (!(b > 0.0)) return 0.0;
  const double h2m = u.hbar2_over_2m();
  auto f = [&](double s) {
    const double de = V(b - s * s) - E;
    return de > 0.0 ? 2.0 * s * std::sqrt(de / h2m) : 0.0;
  };
  return 2.0 * integrate(f, 0.0, std::sqrt(b), 1e-12);
}

WkbQuantities wkb_quantities(const RosenMorseDouble& p, const UnitSystem& u, double E, const TurningPoints& tp) {
  const auto g = rm_derived_geometry(p);
  if (!(E > evaluate(p, g.x0) && E < evaluate(p, 0.0))) throw DomainError("energy outside the barrier range");
  if (std::abs(tp.energy - E) > 1e-9 * std::max(1.0, std::abs(E)))
    throw DomainError("turning points were computed at a different energy");
  auto V = [p](double x) { return evaluate(p, x); };
  WkbQuantities w;
  w.phi = barrier_integral(V, u, E, tp.b_inner);
  w.t_cl = classical_period(V, u, E, tp.b_inner, tp.c_outer);
  const double ephi = std::exp(w.phi);
  w.tau_wkb = ephi * w.t_cl;
  w.t_big_wkb = kPi * ephi * w.t_cl;
  w.delta_e_wkb = 2.0 * u.hbar / w.t_cl * std::exp(-w.phi);

  // Validity scan, skipping 10% of each interval next to the turning points.
  auto measure = [&](double x) {
    const double de = std::abs(E - V(x));
    return u.hbar * u.mass * std::abs(derivative(p, x)) / std::pow(2.0 * u.mass * de, 1.5);
  };
  const int n = 400;
  for (int i = 0; i <= n; ++i) {
    const double f = 0.1 + 0.8 * i / n;
    w.validity = std::max(w.validity, measure(tp.b_inner + f * (tp.c_outer - tp.b_inner)));
    w.validity = std::max(w.validity, measure(-0.9 * tp.b_inner + 1.8 * tp.b_inner * i / n));
  }
  return w;
}

double qm_sq_ratio(double tau_qm, double tau_bar) {
  if (!(tau_qm > 0.0 && tau_bar > 0.0)) throw DomainError("ratio needs positive times");
  return tau_qm / tau_bar;
}

double nu_sq(double tau_bar) {
  if (!(tau_bar > 0.0)) throw DomainError("nu_sq needs a positive tau_bar");
  return 1.0 / (kPi * tau_bar);
}

}  // namespace sqt
