#include "sqt/osmotic.hpp"

#include <algorithm>
#include <cmath>

#include "sqt/error.hpp"
#include "sqt/numerics.hpp"

namespace sqt {

OsmoticField OsmoticField::square_well(const SquareDoubleWell& w, const UnitSystem& u, double k_even) {
  const double k0 = square_k0(w, u);
  if (!(k_even > 0.0 && k_even < k0)) throw DomainError("square-well drift needs 0 < k < k0");
  if (std::abs(square_even_condition(w, u, k_even)) > 1e-8 * k0)
    throw DomainError("square-well drift needs k on the even branch");
  OsmoticField f;
  f.kind_ = FieldKind::ClosedForm;
  f.sigma2_ = u.diffusion();
  f.mass_ = u.mass;
  f.lo_ = -w.wall();
  f.hi_ = w.wall();
  f.well_ = w;
  f.k_ = k_even;
  f.kappa_ = std::sqrt(k0 * k0 - k_even * k_even);
  return f;
}

OsmoticField OsmoticField::from_state(const BoundState& s, const UnitSystem& u) {
  if (s.nodes != 0) throw DomainError("osmotic drift needs a nodeless state");
  const std::size_t n = s.psi.size();
  if (n < 4) throw DomainError("state grid too small for interpolation");
  std::vector<double> y(n);
  double ymax = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(s.psi[i]);
    y[i] = a > 0.0 ? 2.0 * std::log(a) : -INFINITY;
    ymax = std::max(ymax, y[i]);
  }
  // Floor ln(rho) where the grid edges pin psi to zero.
  const double floor = ymax - 690.0;
  for (auto& v : y) v = std::max(v, floor);
  OsmoticField f;
  f.kind_ = FieldKind::GridInterpolated;
  f.sigma2_ = u.diffusion();
  f.mass_ = u.mass;
  f.lo_ = s.grid.lo;
  f.hi_ = s.grid.hi;
  const auto m = pchip_slopes(s.grid, y);
  f.table_ = std::make_shared<const simd::DriftTable>(
      simd::drift_from_log_density(s.grid.lo, s.grid.step(), y, m, 0.5 * f.sigma2_));
  return f;
}

int OsmoticField::region_of(double x) const {
  const double hd = 0.5 * well_.d;
  if (x < -hd) return -1;
  if (x > hd) return 1;
  return 0;
}

double OsmoticField::u_region(double x, int region) const {
  switch (region) {
    case -1:
      return sigma2_ * k_ / std::tan(k_ * (x + well_.wall()));
    case 1:
      return -sigma2_ * k_ / std::tan(k_ * (well_.wall() - x));
    default:
      return sigma2_ * kappa_ * std::tanh(kappa_ * x);
  }
}

double OsmoticField::du_dx(double x, int region) const {
  if (region == 0) {
    const double c = std::cosh(kappa_ * x);
    return sigma2_ * kappa_ * kappa_ / (c * c);
  }
  const double s = region < 0 ? std::sin(k_ * (x + well_.wall())) : std::sin(k_ * (well_.wall() - x));
  return -sigma2_ * k_ * k_ / (s * s);
}

double OsmoticField::velocity(double x) const {
  if (!std::isfinite(x)) throw DomainError("osmotic velocity at non-finite x");
  if (kind_ == FieldKind::GridInterpolated) {
    if (x < lo_ || x > hi_) throw DomainError("osmotic velocity outside the state grid");
    return table_->eval(x);
  }
  if (std::abs(x) >= well_.wall()) throw DomainError("infinite-wall region");
  return u_region(x, region_of(x));
}

simd::DriftTable OsmoticField::drift_table(double cap) const {
  if (kind_ == FieldKind::GridInterpolated) return *table_;
  // Nodes land exactly on +-d/2 so the kink in u' sits on cell boundaries.
  const double hd = 0.5 * well_.d;
  const double target = well_.b / 60000.0;
  const auto n_half = static_cast<std::int64_t>(std::ceil(hd / target));
  const double h = hd / static_cast<double>(n_half);
  const auto n_side = static_cast<std::int64_t>(std::ceil((well_.wall() - hd) / h));
  simd::DriftTable t;
  t.h = h;
  t.inv_h = 1.0 / h;
  t.lo = -hd - static_cast<double>(n_side) * h;
  t.cells = 2 * (n_side + n_half);
  t.coef.assign(static_cast<std::size_t>(4 * t.cells), 0.0);
  const double wall = well_.wall();
  for (std::int64_t i = 0; i < t.cells; ++i) {
    const double xa = i < n_side ? -hd - static_cast<double>(n_side - i) * h
                                 : (i < n_side + 2 * n_half ? -hd + static_cast<double>(i - n_side) * h
                                                            : hd + static_cast<double>(i - n_side - 2 * n_half) * h);
    const double xb = xa + h;
    const int region = region_of(0.5 * (xa + xb));
    double* c = t.coef.data() + 4 * i;
    const bool inside = xa > -wall && xb < wall;
    double ua = 0.0, ub = 0.0;
    if (inside) {
      ua = u_region(xa, region);
      ub = u_region(xb, region);
    }
    if (!inside || std::abs(ua) >= cap || std::abs(ub) >= cap) {
      // Clamped linear cell next to a wall.
      const double sign = xa < 0.0 ? 1.0 : -1.0;
      ua = xa > -wall && xa < wall ? std::clamp(u_region(xa, region), -cap, cap) : sign * cap;
      ub = xb > -wall && xb < wall ? std::clamp(u_region(xb, region), -cap, cap) : sign * cap;
      c[0] = ua;
      c[1] = ub - ua;
      continue;
    }
    const double da = h * du_dx(xa, region);
    const double db = h * du_dx(xb, region);
    c[0] = ua;
    c[1] = da;
    c[2] = 3.0 * (ub - ua) - 2.0 * da - db;
    c[3] = 2.0 * (ua - ub) + da + db;
  }
  return t;
}

double osmotic_velocity(const OsmoticField& f, double x) { return f.velocity(x); }

double instantaneous_energy(const OsmoticField& f, double x, const std::function<double(double)>& V) {
  const double u = f.velocity(x);
  return 0.5 * f.mass() * u * u + V(x);
}

}  // namespace sqt
