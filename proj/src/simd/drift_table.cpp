#include "sqt/simd/drift_table.hpp"

#include "sqt/error.hpp"

namespace sqt::simd {

DriftTable drift_from_log_density(double lo, double h, const std::vector<double>& y, const std::vector<double>& m,
                                  double scale) {
  if (y.size() < 2 || y.size() != m.size()) throw DomainError("drift table needs matching node arrays");
  DriftTable t;
  t.lo = lo;
  t.h = h;
  t.inv_h = 1.0 / h;
  t.cells = static_cast<std::int64_t>(y.size() - 1);
  t.coef.resize(4 * y.size() - 4);
  const double f = scale / h;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double dy = y[i] - y[i + 1];
    double* c = t.coef.data() + 4 * i;
    c[0] = f * (h * m[i]);
    c[1] = f * (-6.0 * dy - 4.0 * h * m[i] - 2.0 * h * m[i + 1]);
    c[2] = f * (6.0 * dy + 3.0 * h * m[i] + 3.0 * h * m[i + 1]);
    c[3] = 0.0;
  }
  return t;
}

}  // namespace sqt::simd
