#pragma once

// Box-Muller normals built only from +, -, *, /, sqrt and floor so that the
// scalar path and the vector kernels round identically.

#include <bit>
#include <cmath>
#include <cstdint>

#include "sqt/simd/philox.hpp"

namespace sqt::simd {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrtHalf2 = 1.41421356237309504880;  // sqrt(2)
inline constexpr double kHalfPi = 1.57079632679489661923;
inline constexpr std::uint64_t kOneBits = 0x3ff0000000000000ULL;
inline constexpr std::uint64_t kMantMask = 0x000fffffffffffffULL;

// Odd coefficients 1/(2j+1) of the atanh series, j = 1..10.
inline constexpr double kLogSeries[10] = {1.0 / 3,  1.0 / 5,  1.0 / 7,  1.0 / 9,  1.0 / 11,
                                          1.0 / 13, 1.0 / 15, 1.0 / 17, 1.0 / 19, 1.0 / 21};
// Taylor coefficients of sin (odd powers 3..17) and cos (even powers 2..18).
inline constexpr double kSinC[8] = {-1.0 / 6.0,
                                    1.0 / 120.0,
                                    -1.0 / 5040.0,
                                    1.0 / 362880.0,
                                    -1.0 / 39916800.0,
                                    1.0 / 6227020800.0,
                                    -1.0 / 1307674368000.0,
                                    1.0 / 355687428096000.0};
inline constexpr double kCosC[9] = {-1.0 / 2.0,
                                    1.0 / 24.0,
                                    -1.0 / 720.0,
                                    1.0 / 40320.0,
                                    -1.0 / 3628800.0,
                                    1.0 / 479001600.0,
                                    -1.0 / 87178291200.0,
                                    1.0 / 20922789888000.0,
                                    -1.0 / 6402373705728000.0};

// Uniform on [0, 1) with 52 random bits.
inline double uniform52(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return std::bit_cast<double>((bits >> 12) | kOneBits) - 1.0;
}

// Natural log for normal, positive x.
inline double log_portable(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  const std::int64_t e = static_cast<std::int64_t>(bits >> 52) - 1023;
  double m = std::bit_cast<double>((bits & kMantMask) | kOneBits);
  double ed = static_cast<double>(e);
  if (m > kSqrtHalf2) {
    m = m * 0.5;
    ed = ed + 1.0;
  }
  const double f = (m - 1.0) / (m + 1.0);
  const double f2 = f * f;
  double p = kLogSeries[9];
  for (int j = 8; j >= 0; --j) p = p * f2 + kLogSeries[j];
  const double series = 2.0 * f + 2.0 * f * (f2 * p);
  return ed * kLn2Hi + (ed * kLn2Lo + series);
}

// sin and cos of 2*pi*u for u in [0, 1).
inline void sincos_2pi(double u, double& s, double& c) {
  const double r = 4.0 * u;
  const double q = std::floor(r + 0.5);
  const double th = (r - q) * kHalfPi;
  const double t2 = th * th;
  double ps = kSinC[7];
  for (int j = 6; j >= 0; --j) ps = ps * t2 + kSinC[j];
  double pc = kCosC[8];
  for (int j = 7; j >= 0; --j) pc = pc * t2 + kCosC[j];
  const double sn = th + th * (t2 * ps);
  const double cs = 1.0 + t2 * pc;
  if (q == 1.0) {
    s = cs;
    c = -sn;
  } else if (q == 2.0) {
    s = -sn;
    c = -cs;
  } else if (q == 3.0) {
    s = -cs;
    c = sn;
  } else {
    s = sn;
    c = cs;
  }
}

// Two independent standard normals for steps 2*pair and 2*pair + 1.
inline void normal_pair(std::uint64_t seed, std::uint64_t traj, std::uint64_t pair, double& z0, double& z1) {
  const PhiloxBlock w = philox_draw(seed, traj, pair);
  const double ua = 1.0 - uniform52(w[0], w[1]);
  const double ub = uniform52(w[2], w[3]);
  const double l = log_portable(ua);
  const double rr = -2.0 * l;
  const double rad = std::sqrt(rr > 0.0 ? rr : 0.0);
  double s, c;
  sincos_2pi(ub, s, c);
  z0 = rad * c;
  z1 = rad * s;
}

}  // namespace sqt::simd
