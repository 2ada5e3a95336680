#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sqt/dynamics.hpp"
#include "sqt/eigensolver.hpp"
#include "sqt/potentials.hpp"

namespace sqt {

struct FptEnsemble {
  std::vector<double> taus;  // sorted, timed-out runs excluded
  std::uint64_t n = 0;
  std::uint64_t timed_out = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::string config_digest;
  bool timeout_warning = false;  // timed-out share above 0.1%
};

struct TailFit {
  double rate = 0.0;
  double rate_stderr = 0.0;
  double amplitude = 0.0;
  double threshold = 0.0;
  double goodness = 0.0;  // R^2 of the log-histogram line
  std::uint64_t exceedances = 0;
};

struct HistogramBin {
  double left, right;
  std::uint64_t count;
  double density;
};

struct HighBarrierMfpt {
  double tau = 0.0;
  double occupancy = 0.0;      // integral of rho over the left well (-c, -b)
  double barrier_ratio = 0.0;  // integral of rho over (-b, b) / occupancy
  bool factorization_invalid = false;
};

// tau = (2m/hbar) int_{x_start}^{x_end} dy / p(y) int_a^y p(z) dz, with p = psi^2.
double mfpt_quadrature(const BoundState& s, const UnitSystem& u, double a, double x_start, double x_end);
// Probability mass of the state left of a (what the reflecting edge discards).
double exterior_mass(const BoundState& s, double a);
HighBarrierMfpt mfpt_high_barrier_quadrature(const BoundState& s, const UnitSystem& u, const TurningPoints& tp);

// Smallest eigenvalue of the backward operator on (a, b_abs), reflecting at a, absorbing at b_abs.
double survival_decay_rate(const std::function<double(double)>& log_rho, double sigma2, double a, double b_abs,
                           std::size_t cells);
double survival_decay_rate(const BoundState& s, const UnitSystem& u, double a, double b_abs);

FptEnsemble make_ensemble(const std::vector<TrajectoryRecord>& recs, std::string digest);
FptEnsemble make_ensemble(std::vector<double> taus, std::uint64_t timed_out, std::string digest);
TailFit fit_exponential_tail(const FptEnsemble& e, double threshold);
// Threshold defaults to the sample median.
TailFit fit_exponential_tail(const FptEnsemble& e);
std::vector<HistogramBin> histogram(const FptEnsemble& e, std::size_t bins, double lo, double hi);

}  // namespace sqt
