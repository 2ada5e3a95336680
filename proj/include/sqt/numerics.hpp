#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sqt {

struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i) const;
  std::vector<double> points() const;
  // Index of the node at or left of x, clamped to [0, n-2].
  std::size_t cell(double x) const;
};

double trapezoid(const std::vector<double>& y, double h);
// prefix[i] = trapezoid integral of y over nodes [0, i].
std::vector<double> cumulative_trapezoid(const std::vector<double>& y, double h);

// Bisection of a sign-changing bracket to an absolute width tolerance.
double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol);

// Adaptive Gauss-Kronrod on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

// Monotone (PCHIP) node slopes for samples y on a uniform grid.
std::vector<double> pchip_slopes(const UniformGrid& g, const std::vector<double>& y);

}  // namespace sqt
