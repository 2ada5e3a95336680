#pragma once

#include <cstdint>

#include "sqt/simd/drift_table.hpp"
#include "sqt/simd/kernel.hpp"

namespace sqt::simd {

// One Euler-Maruyama step: x + u dt + noise z, clamped drift, reflections.
// Written to mirror the vector kernels operation for operation.
struct StepOut {
  double x;
  double u_raw;
  bool clamped;
};

inline StepOut em_step(const DriftTable& table, const WalkParams& p, double x, double z) {
  const double u_raw = table.eval(x);
  double u = u_raw < p.cap ? u_raw : p.cap;
  u = u > -p.cap ? u : -p.cap;
  const bool clamped = (u_raw > p.cap) || (u_raw < -p.cap);
  double xn = (x + u * p.dt) + p.noise * z;
  if (xn < p.reflect_lo) xn = 2.0 * p.reflect_lo - xn;
  if (xn > p.reflect_hi) xn = 2.0 * p.reflect_hi - xn;
  return {xn, u_raw, clamped};
}

}  // namespace sqt::simd
