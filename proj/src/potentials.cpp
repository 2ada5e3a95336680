#include "sqt/potentials.hpp"

#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "sqt/error.hpp"

namespace sqt {

namespace {

void require_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("potential evaluated at non-finite x");
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
  auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

}  // namespace

SquareDoubleWell SquareDoubleWell::make(double b, double d, double V0) {
  if (!(d > 0.0 && d < b && V0 > 0.0) || !std::isfinite(b) || !std::isfinite(V0))
    throw DomainError("square double well needs 0 < d < b and V0 > 0");
  return SquareDoubleWell{b, d, V0};
}

RosenMorseDouble RosenMorseDouble::make(double A, double B, double d, double k) {
  if (!(A >= 0.0 && B > 0.0 && d > 0.0 && k > 0.0) || !std::isfinite(A) || !std::isfinite(B))
    throw DomainError("Rosen-Morse needs A >= 0, B > 0, d > 0, k > 0");
  if (!(A < 2.0 * B)) throw DomainError("Rosen-Morse needs A < 2B");
  return RosenMorseDouble{A, B, d, k};
}

double evaluate(const SquareDoubleWell& p, double x) {
  require_finite(x);
  const double s = std::abs(x);
  if (s >= p.wall()) throw DomainError("infinite-wall region at x = " + std::to_string(x));
  return s < 0.5 * p.d ? p.V0 : 0.0;
}

double evaluate(const RosenMorseDouble& p, double x) {
  require_finite(x);
  const double s = std::abs(x) / p.d - p.k;
  const double c = std::cosh(s);
  return p.A * std::tanh(s) - p.B / (c * c);
}

double evaluate(const Potential& p, double x) {
  return std::visit([x](const auto& q) { return evaluate(q, x); }, p);
}

double derivative(const RosenMorseDouble& p, double x) {
  require_finite(x);
  const double s = std::abs(x) / p.d - p.k;
  const double t = std::tanh(s);
  const double c = std::cosh(s);
  const double sech2 = 1.0 / (c * c);
  const double dv = (p.A * sech2 + 2.0 * p.B * sech2 * t) / p.d;
  return x < 0.0 ? -dv : dv;
}

RmGeometry rm_derived_geometry(const RosenMorseDouble& p) {
  const double r = p.A / (2.0 * p.B);
  if (!(r < 1.0)) throw DomainError("arctanh argument A/2B must be below 1");
  const double tk = std::tanh(p.k);
  RmGeometry g;
  g.x0 = p.d * (p.k - std::atanh(r));
  g.V0 = p.A * p.A / (4.0 * p.B) - p.A * tk + p.B * tk * tk;
  g.VD = p.A + p.B + p.A * p.A / (4.0 * p.B);
  return g;
}

TurningPoints turning_points(const SquareDoubleWell& p, double E) {
  if (!(E > 0.0 && E < p.V0)) throw DomainError("no classically forbidden barrier at this energy");
  return TurningPoints{0.5 * p.d, 0.5 * p.b, E};
}

TurningPoints turning_points(const RosenMorseDouble& p, double E) {
  const auto g = rm_derived_geometry(p);
  const double vmin = evaluate(p, g.x0);
  const double vtop = evaluate(p, 0.0);
  if (!(E > vmin && E < vtop)) throw DomainError("no classically forbidden barrier at this energy");
  auto f = [&](double x) { return evaluate(p, x) - E; };
  TurningPoints tp;
  tp.energy = E;
  tp.b_inner = g.x0 > 0.0 ? bisect_root(f, 0.0, g.x0) : 0.0;
  double hi = g.x0 + p.d;
  while (f(hi) < 0.0) hi += 2.0 * (hi - g.x0);
  tp.c_outer = bisect_root(f, g.x0, hi);
  return tp;
}

double reduced_mass(double m_h, double m_n) {
  if (!(m_h > 0.0 && m_n > 0.0)) throw DomainError("masses must be positive");
  return 3.0 * m_h * m_n / (3.0 * m_h + m_n);
}

std::function<double(double)> as_function(const Potential& p) {
  return [p](double x) { return evaluate(p, x); };
}

}  // namespace sqt
