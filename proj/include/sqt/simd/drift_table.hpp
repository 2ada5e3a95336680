#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sqt::simd {

// Piecewise cubic drift on uniform cells; four coefficients per cell in the
// local coordinate t in [0, 1): u = ((c3 t + c2) t + c1) t + c0.
struct DriftTable {
  double lo = 0.0;
  double h = 1.0;
  double inv_h = 1.0;
  std::int64_t cells = 0;
  std::vector<double> coef;

  double hi() const { return lo + h * static_cast<double>(cells); }

  double eval(double x) const {
    const double s = (x - lo) * inv_h;
    double id = std::floor(s);
    const double top = static_cast<double>(cells - 1);
    id = id > 0.0 ? id : 0.0;
    id = id < top ? id : top;
    const double t = s - id;
    const double* c = coef.data() + 4 * static_cast<std::int64_t>(id);
    return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
  }
};

// Derivative of a cubic Hermite interpolant of y with node slopes m, scaled by `scale`.
DriftTable drift_from_log_density(double lo, double h, const std::vector<double>& y, const std::vector<double>& m,
                                  double scale);

}  // namespace sqt::simd
