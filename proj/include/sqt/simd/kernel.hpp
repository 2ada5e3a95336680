#pragma once

#include <cstddef>
#include <cstdint>

#include "sqt/simd/drift_table.hpp"

namespace sqt::simd {

enum class Isa { Scalar, Avx2 };

struct WalkParams {
  double dt = 0.0;
  double noise = 0.0;  // sqrt(sigma^2 dt)
  double cap = 0.0;    // drift clamp
  double reflect_lo = 0.0;
  double reflect_hi = 0.0;  // +inf when absent
  double absorb_at = 0.0;
  double x_init = 0.0;
  std::uint64_t max_steps = 0;
  std::uint64_t seed = 0;
};

enum WalkStatus : std::uint32_t { kAbsorbed = 0, kTimedOut = 1, kNonFinite = 2 };

struct WalkOutcome {
  std::uint64_t steps = 0;
  std::uint64_t clamped = 0;
  std::uint32_t status = kAbsorbed;
};

// Runs trajectories first_id .. first_id + count - 1 to absorption or timeout.
void walk_scalar(const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
                 WalkOutcome* out);
void walk_avx2(const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
               WalkOutcome* out);
void walk(Isa isa, const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
          WalkOutcome* out);

bool isa_supported(Isa isa);
// Best supported ISA, unless SQT_FORCE_ISA=scalar|avx2 says otherwise.
Isa detect_isa();
const char* isa_name(Isa isa);
Isa parse_isa(const char* name);

}  // namespace sqt::simd
