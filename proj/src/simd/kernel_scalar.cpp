#include <cmath>

#include "sqt/simd/kernel.hpp"
#include "sqt/simd/normal.hpp"
#include "sqt/simd/step.hpp"

namespace sqt::simd {

void walk_scalar(const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
                 WalkOutcome* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint64_t id = first_id + j;
    WalkOutcome o;
    double x = p.x_init;
    std::uint64_t n = 0;
    for (;;) {
      if (n >= p.max_steps) {
        o.status = kTimedOut;
        break;
      }
      double z[2];
      normal_pair(p.seed, id, n / 2, z[0], z[1]);
      bool done = false;
      for (int k = 0; k < 2; ++k) {
        if (k == 1 && n >= p.max_steps) {
          o.status = kTimedOut;
          done = true;
          break;
        }
        const StepOut s = em_step(table, p, x, z[k]);
        x = s.x;
        ++n;
        o.clamped += s.clamped ? 1 : 0;
        if (!std::isfinite(x)) {
          o.status = kNonFinite;
          done = true;
          break;
        }
        if (x >= p.absorb_at) {
          o.status = kAbsorbed;
          done = true;
          break;
        }
      }
      if (done) break;
    }
    o.steps = n;
    out[j] = o;
  }
}

}  // namespace sqt::simd
