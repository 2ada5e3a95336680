#include "sqt/first_passage.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sqt/error.hpp"
#include "sqt/io.hpp"

namespace sqt {

namespace {

// Linear interpolation of psi, rho and the cumulative mass on a bound state's grid.
class StateView {
 public:
  explicit StateView(const BoundState& s) : s_(s), h_(s.grid.step()) {
    std::vector<double> p(s.psi.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s.psi[i] * s.psi[i];
    cum_ = cumulative_trapezoid(p, h_);
    p_ = std::move(p);
  }

  void require_inside(double x, const char* what) const {
    if (!(x >= s_.grid.lo && x <= s_.grid.hi))
      throw DomainError(std::string(what) + " lies outside the state grid");
  }

  double psi(double x) const {
    if (x == s_.grid.hi) return s_.psi.back();
    const std::size_t i = s_.grid.cell(x);
    const double t = (x - s_.grid.at(i)) / h_;
    return s_.psi[i] + t * (s_.psi[i + 1] - s_.psi[i]);
  }

  double log_rho(double x) const {
    const double a = std::abs(psi(x));
    return a > 0.0 ? 2.0 * std::log(a) : -INFINITY;
  }

  double mass_left(double x) const {
    const std::size_t i = s_.grid.cell(x);
    const double t = (x - s_.grid.at(i)) / h_;
    return cum_[i] + h_ * (t * p_[i] + 0.5 * t * t * (p_[i + 1] - p_[i]));
  }

  // Trapezoid over [x1, x2] using all grid nodes inside plus the two endpoints.
  template <class F>
  double integrate(double x1, double x2, F f) const {
    if (!(x2 > x1)) return 0.0;
    std::size_t i = s_.grid.cell(x1) + 1;
    double prev_x = x1, prev_f = f(x1), sum = 0.0;
    for (; i < s_.grid.n && s_.grid.at(i) < x2; ++i) {
      const double xi = s_.grid.at(i);
      if (xi <= x1) continue;
      const double fi = f(xi);
      sum += 0.5 * (xi - prev_x) * (prev_f + fi);
      prev_x = xi;
      prev_f = fi;
    }
    sum += 0.5 * (x2 - prev_x) * (prev_f + f(x2));
    return sum;
  }

 private:
  const BoundState& s_;
  double h_;
  std::vector<double> p_, cum_;
};

double smallest_tridiagonal_eigenvalue(std::vector<double>& d, std::vector<double>& e) {
  const auto n = static_cast<lapack_int>(d.size());
  lapack_int m = 0, nsplit = 0;
  std::vector<double> w(d.size());
  std::vector<lapack_int> iblock(d.size()), isplit(d.size());
  const lapack_int info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, 1, 0.0, d.data(), e.data(), &m, &nsplit,
                                         w.data(), iblock.data(), isplit.data());
  if (info != 0 || m < 1) throw NumericalError("tridiagonal eigenvalue solver failed, info " + std::to_string(info));
  return w[0];
}

double decay_rate_once(const std::function<double(double)>& log_rho, double sigma2, double a, double b,
                       std::size_t cells) {
  const double h = (b - a) / static_cast<double>(cells);
  const double c = 0.5 * sigma2 / (h * h);
  std::vector<double> lc(cells), lf(cells + 1);
  for (std::size_t i = 0; i < cells; ++i) {
    lc[i] = log_rho(a + (static_cast<double>(i) + 0.5) * h);
    if (!std::isfinite(lc[i])) throw NumericalError("density vanishes inside the survival window");
  }
  for (std::size_t j = 1; j <= cells; ++j) lf[j] = log_rho(a + static_cast<double>(j) * h);
  std::vector<double> d(cells), e(cells > 1 ? cells - 1 : 1, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    double di = 0.0;
    if (i > 0) di += std::exp(lf[i] - lc[i]);
    if (i + 1 < cells)
      di += std::exp(lf[i + 1] - lc[i]);
    else
      di += 2.0 * std::exp(lf[cells] - lc[i]);  // Dirichlet ghost half a cell away
    d[i] = c * di;
    if (i + 1 < cells) e[i] = -c * std::exp(lf[i + 1] - 0.5 * (lc[i] + lc[i + 1]));
  }
  return smallest_tridiagonal_eigenvalue(d, e);
}

}  // namespace

double mfpt_quadrature(const BoundState& s, const UnitSystem& u, double a, double x_start, double x_end) {
  StateView v(s);
  v.require_inside(a, "reflecting endpoint");
  v.require_inside(x_start, "start point");
  v.require_inside(x_end, "end point");
  if (!(a < x_start && x_start < x_end)) throw DomainError("mfpt_quadrature needs a < x_start < x_end");
  const double fa = v.mass_left(a);
  auto g = [&](double y) {
    const double lr = v.log_rho(y);
    if (!std::isfinite(lr)) throw NumericalError("density vanishes inside the MFPT window");
    const double F = v.mass_left(y) - fa;
    return F > 0.0 ? std::exp(std::log(F) - lr) : 0.0;
  };
  return 2.0 / u.diffusion() * v.integrate(x_start, x_end, g);
}

double exterior_mass(const BoundState& s, double a) {
  StateView v(s);
  v.require_inside(a, "reflecting endpoint");
  return v.mass_left(a);
}

HighBarrierMfpt mfpt_high_barrier_quadrature(const BoundState& s, const UnitSystem& u, const TurningPoints& tp) {
  StateView v(s);
  HighBarrierMfpt r;
  const double b = tp.b_inner, c = tp.c_outer;
  v.require_inside(-c, "outer turning point");
  v.require_inside(c, "outer turning point");
  r.occupancy = v.mass_left(-b) - v.mass_left(-c);
  r.factorization_invalid = r.occupancy < 0.4;
  if (!(b > 0.0)) return r;
  const double inv = v.integrate(-b, b, [&](double y) {
    const double lr = v.log_rho(y);
    if (!std::isfinite(lr)) throw NumericalError("density vanishes inside the barrier");
    return std::exp(-lr);
  });
  r.tau = 2.0 / u.diffusion() * inv * r.occupancy;
  r.barrier_ratio = (v.mass_left(b) - v.mass_left(-b)) / r.occupancy;
  return r;
}

double survival_decay_rate(const std::function<double(double)>& log_rho, double sigma2, double a, double b_abs,
                           std::size_t cells) {
  if (!(b_abs > a)) throw DomainError("survival window needs a < b_abs");
  if (cells < 8) throw DomainError("survival window needs at least 8 cells");
  const double coarse = decay_rate_once(log_rho, sigma2, a, b_abs, cells);
  const double fine = decay_rate_once(log_rho, sigma2, a, b_abs, 2 * cells);
  if (!(fine > 0.0)) throw NumericalError("survival decay rate is not positive");
  if (std::abs(fine - coarse) > 0.01 * fine)
    throw NumericalError("survival decay rate not converged under refinement: " + fmt17(coarse) + " vs " +
                         fmt17(fine));
  return fine;
}

double survival_decay_rate(const BoundState& s, const UnitSystem& u, double a, double b_abs) {
  StateView v(s);
  v.require_inside(a, "reflecting endpoint");
  v.require_inside(b_abs, "absorbing endpoint");
  const auto cells = static_cast<std::size_t>(std::ceil((b_abs - a) / s.grid.step()));
  return survival_decay_rate([&](double x) { return v.log_rho(x); }, u.diffusion(), a, b_abs,
                             std::max<std::size_t>(cells, 8));
}

FptEnsemble make_ensemble(std::vector<double> taus, std::uint64_t timed_out, std::string digest) {
  FptEnsemble e;
  std::sort(taus.begin(), taus.end());
  e.taus = std::move(taus);
  e.n = e.taus.size();
  e.timed_out = timed_out;
  e.config_digest = std::move(digest);
  if (e.n > 0) {
    e.mean = std::accumulate(e.taus.begin(), e.taus.end(), 0.0) / static_cast<double>(e.n);
    double ss = 0.0;
    for (double t : e.taus) ss += (t - e.mean) * (t - e.mean);
    e.stderr_ = e.n > 1 ? std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n)) : 0.0;
  }
  const double total = static_cast<double>(e.n + e.timed_out);
  e.timeout_warning = total > 0.0 && static_cast<double>(e.timed_out) > 1e-3 * total;
  return e;
}

FptEnsemble make_ensemble(const std::vector<TrajectoryRecord>& recs, std::string digest) {
  std::vector<double> taus;
  taus.reserve(recs.size());
  std::uint64_t to = 0;
  for (const auto& r : recs) {
    if (r.timed_out)
      ++to;
    else
      taus.push_back(r.tau);
  }
  return make_ensemble(std::move(taus), to, std::move(digest));
}

TailFit fit_exponential_tail(const FptEnsemble& e, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("tail threshold must be nonnegative");
  const auto first = std::lower_bound(e.taus.begin(), e.taus.end(), threshold);
  const auto n_exc = static_cast<std::uint64_t>(e.taus.end() - first);
  if (n_exc < 100) throw NumericalError("insufficient data: " + std::to_string(n_exc) + " exceedances (need 100)");
  double sum = 0.0;
  for (auto it = first; it != e.taus.end(); ++it) sum += *it - threshold;
  TailFit f;
  f.threshold = threshold;
  f.exceedances = n_exc;
  f.rate = static_cast<double>(n_exc) / sum;
  f.rate_stderr = f.rate / std::sqrt(static_cast<double>(n_exc));
  f.amplitude = static_cast<double>(n_exc) / static_cast<double>(e.n) * f.rate * std::exp(f.rate * threshold);

  // Goodness: R^2 of ln(density) against bin centre over the exceedances.
  const double hi = *(first + static_cast<std::ptrdiff_t>(0.99 * static_cast<double>(n_exc - 1)));
  const std::size_t bins = 40;
  if (hi > threshold) {
    const auto hist = histogram(e, bins, threshold, hi);
    std::vector<double> xs, ys;
    for (const auto& b : hist)
      if (b.count >= 5) {
        xs.push_back(0.5 * (b.left + b.right));
        ys.push_back(std::log(b.density));
      }
    if (xs.size() >= 3) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
      }
      f.goodness = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    }
  }
  return f;
}

TailFit fit_exponential_tail(const FptEnsemble& e) {
  if (e.taus.empty()) throw NumericalError("insufficient data: empty ensemble");
  const std::size_t n = e.taus.size();
  const double median = n % 2 ? e.taus[n / 2] : 0.5 * (e.taus[n / 2 - 1] + e.taus[n / 2]);
  return fit_exponential_tail(e, median);
}

std::vector<HistogramBin> histogram(const FptEnsemble& e, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw DomainError("histogram needs bins > 0 and hi > lo");
  const double w = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t i = 0; i < bins; ++i) out[i] = {lo + static_cast<double>(i) * w, lo + static_cast<double>(i + 1) * w, 0, 0.0};
  out.back().right = hi;
  for (double t : e.taus) {
    if (t < lo || t > hi) continue;
    auto i = static_cast<std::size_t>((t - lo) / w);
    if (i >= bins) i = bins - 1;
    ++out[i].count;
  }
  const double n = static_cast<double>(std::max<std::uint64_t>(e.n, 1));
  for (auto& b : out) b.density = static_cast<double>(b.count) / (n * (b.right - b.left));
  return out;
}

}  // namespace sqt
