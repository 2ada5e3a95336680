#include "sqt/numerics.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "sqt/error.hpp"

namespace sqt {

double UniformGrid::at(std::size_t i) const {
  if (i + 1 == n) return hi;
  return lo + static_cast<double>(i) * step();
}

std::vector<double> UniformGrid::points() const {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = at(i);
  return x;
}

std::size_t UniformGrid::cell(double x) const {
  const double s = (x - lo) / step();
  if (!(s > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(s);
  return std::min(i, n - 2);
}

double trapezoid(const std::vector<double>& y, double h) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
  return s * h;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double h) {
  std::vector<double> c(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i) c[i] = c[i - 1] + 0.5 * h * (y[i - 1] + y[i]);
  return c;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("bisection bracket has no sign change");
  auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol; };
  auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, rel_tol, &err);
}

std::vector<double> pchip_slopes(const UniformGrid& g, const std::vector<double>& y) {
  auto xs = g.points();
  auto ys = y;
  boost::math::interpolators::pchip<std::vector<double>> p(std::move(xs), std::move(ys));
  std::vector<double> s(g.n);
  for (std::size_t i = 0; i < g.n; ++i) s[i] = p.prime(g.at(i));
  return s;
}

}  // namespace sqt
