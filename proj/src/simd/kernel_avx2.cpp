// Four walkers per 256-bit register. Every floating-point operation mirrors
// the scalar reference in normal.hpp / step.hpp so outcomes are bit-identical.

#include <immintrin.h>

#include <array>
#include <cmath>

#include "sqt/simd/kernel.hpp"
#include "sqt/simd/normal.hpp"

namespace sqt::simd {

namespace {

struct Philox4 {
  __m256i c0, c1, c2, c3;
};

inline Philox4 philox_avx2(Philox4 c, std::uint32_t k0, std::uint32_t k1) {
  const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
  const __m256i lo32 = _mm256_set1_epi64x(0xffffffffLL);
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    const __m256i p0 = _mm256_mul_epu32(m0, c.c0);
    const __m256i p1 = _mm256_mul_epu32(m1, c.c2);
    const __m256i kk0 = _mm256_set1_epi64x(k0);
    const __m256i kk1 = _mm256_set1_epi64x(k1);
    Philox4 n;
    n.c0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c.c1), kk0);
    n.c1 = _mm256_and_si256(p1, lo32);
    n.c2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c.c3), kk1);
    n.c3 = _mm256_and_si256(p0, lo32);
    c = n;
  }
  return c;
}

inline __m256d uniform52_avx2(__m256i hi, __m256i lo) {
  const __m256i bits = _mm256_or_si256(_mm256_slli_epi64(hi, 32), lo);
  const __m256i one = _mm256_set1_epi64x(static_cast<long long>(kOneBits));
  const __m256d v = _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 12), one));
  return _mm256_sub_pd(v, _mm256_set1_pd(1.0));
}

inline __m256d neg(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

inline __m256d log_avx2(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d ed = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(two52))), two52);
  ed = _mm256_sub_pd(ed, _mm256_set1_pd(1023.0));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(kMantMask)),
                                                  _mm256_set1_epi64x(static_cast<long long>(kOneBits))));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrtHalf2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  ed = _mm256_blendv_pd(ed, _mm256_add_pd(ed, _mm256_set1_pd(1.0)), big);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d f2 = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(kLogSeries[9]);
  for (int j = 8; j >= 0; --j) p = _mm256_add_pd(_mm256_mul_pd(p, f2), _mm256_set1_pd(kLogSeries[j]));
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d series =
      _mm256_add_pd(_mm256_mul_pd(two, f), _mm256_mul_pd(_mm256_mul_pd(two, f), _mm256_mul_pd(f2, p)));
  return _mm256_add_pd(_mm256_mul_pd(ed, _mm256_set1_pd(kLn2Hi)),
                       _mm256_add_pd(_mm256_mul_pd(ed, _mm256_set1_pd(kLn2Lo)), series));
}

inline void sincos_2pi_avx2(__m256d u, __m256d& s, __m256d& c) {
  const __m256d r = _mm256_mul_pd(_mm256_set1_pd(4.0), u);
  const __m256d q = _mm256_floor_pd(_mm256_add_pd(r, _mm256_set1_pd(0.5)));
  const __m256d th = _mm256_mul_pd(_mm256_sub_pd(r, q), _mm256_set1_pd(kHalfPi));
  const __m256d t2 = _mm256_mul_pd(th, th);
  __m256d ps = _mm256_set1_pd(kSinC[7]);
  for (int j = 6; j >= 0; --j) ps = _mm256_add_pd(_mm256_mul_pd(ps, t2), _mm256_set1_pd(kSinC[j]));
  __m256d pc = _mm256_set1_pd(kCosC[8]);
  for (int j = 7; j >= 0; --j) pc = _mm256_add_pd(_mm256_mul_pd(pc, t2), _mm256_set1_pd(kCosC[j]));
  const __m256d sn = _mm256_add_pd(th, _mm256_mul_pd(th, _mm256_mul_pd(t2, ps)));
  const __m256d cs = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(t2, pc));
  const __m256d q1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d q2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d q3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  s = sn;
  c = cs;
  s = _mm256_blendv_pd(s, cs, q1);
  c = _mm256_blendv_pd(c, neg(sn), q1);
  s = _mm256_blendv_pd(s, neg(sn), q2);
  c = _mm256_blendv_pd(c, neg(cs), q2);
  s = _mm256_blendv_pd(s, neg(cs), q3);
  c = _mm256_blendv_pd(c, sn, q3);
}

struct Consts {
  __m256d lo, inv_h, top, zero, two52, dt, noise, cap, negcap, rlo, rhi, absorb, two;
  __m256i two52_bits;
  const double* coef;
};

inline __m256d drift_avx2(const Consts& k, __m256d x) {
  const __m256d s = _mm256_mul_pd(_mm256_sub_pd(x, k.lo), k.inv_h);
  __m256d id = _mm256_floor_pd(s);
  id = _mm256_max_pd(id, k.zero);
  id = _mm256_min_pd(id, k.top);
  const __m256d t = _mm256_sub_pd(s, id);
  const __m256i idx =
      _mm256_slli_epi64(_mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(id, k.two52)), k.two52_bits), 2);
  const __m256d c0 = _mm256_i64gather_pd(k.coef, idx, 8);
  const __m256d c1 = _mm256_i64gather_pd(k.coef + 1, idx, 8);
  const __m256d c2 = _mm256_i64gather_pd(k.coef + 2, idx, 8);
  const __m256d c3 = _mm256_i64gather_pd(k.coef + 3, idx, 8);
  return _mm256_add_pd(
      _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(c3, t), c2), t), c1), t), c0);
}

inline __m256d step_avx2(const Consts& k, __m256d x, __m256d z, __m256d& clamp_mask) {
  const __m256d u_raw = drift_avx2(k, x);
  __m256d u = _mm256_min_pd(u_raw, k.cap);
  u = _mm256_max_pd(u, k.negcap);
  clamp_mask = _mm256_or_pd(_mm256_cmp_pd(u_raw, k.cap, _CMP_GT_OQ), _mm256_cmp_pd(u_raw, k.negcap, _CMP_LT_OQ));
  __m256d xn = _mm256_add_pd(_mm256_add_pd(x, _mm256_mul_pd(u, k.dt)), _mm256_mul_pd(k.noise, z));
  const __m256d mlo = _mm256_cmp_pd(xn, k.rlo, _CMP_LT_OQ);
  xn = _mm256_blendv_pd(xn, _mm256_sub_pd(_mm256_mul_pd(k.two, k.rlo), xn), mlo);
  const __m256d mhi = _mm256_cmp_pd(xn, k.rhi, _CMP_GT_OQ);
  xn = _mm256_blendv_pd(xn, _mm256_sub_pd(_mm256_mul_pd(k.two, k.rhi), xn), mhi);
  return xn;
}

// Lanes that stop: absorbed, non-finite, or out of steps.
inline __m256d stop_mask(const Consts& k, __m256d x, __m256i n, __m256i max_m1) {
  const __m256d d = _mm256_sub_pd(x, x);
  const __m256d bad = _mm256_cmp_pd(d, d, _CMP_UNORD_Q);
  const __m256d hit = _mm256_cmp_pd(x, k.absorb, _CMP_GE_OQ);
  const __m256d out = _mm256_castsi256_pd(_mm256_cmpgt_epi64(n, max_m1));
  return _mm256_or_pd(_mm256_or_pd(bad, hit), out);
}

}  // namespace

void walk_avx2(const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
               WalkOutcome* out) {
  if (count == 0) return;
  Consts k;
  k.lo = _mm256_set1_pd(table.lo);
  k.inv_h = _mm256_set1_pd(table.inv_h);
  k.top = _mm256_set1_pd(static_cast<double>(table.cells - 1));
  k.zero = _mm256_setzero_pd();
  k.two52 = _mm256_set1_pd(4503599627370496.0);
  k.two52_bits = _mm256_castpd_si256(k.two52);
  k.dt = _mm256_set1_pd(p.dt);
  k.noise = _mm256_set1_pd(p.noise);
  k.cap = _mm256_set1_pd(p.cap);
  k.negcap = _mm256_set1_pd(-p.cap);
  k.rlo = _mm256_set1_pd(p.reflect_lo);
  k.rhi = _mm256_set1_pd(p.reflect_hi);
  k.absorb = _mm256_set1_pd(p.absorb_at);
  k.two = _mm256_set1_pd(2.0);
  k.coef = table.coef.data();

  const auto k0 = static_cast<std::uint32_t>(p.seed);
  const auto k1 = static_cast<std::uint32_t>(p.seed >> 32);
  const __m256i max_m1 = _mm256_set1_epi64x(static_cast<long long>(p.max_steps) - 1);
  const __m256i lo32 = _mm256_set1_epi64x(0xffffffffLL);
  const __m256i one_i = _mm256_set1_epi64x(1);

  // Per-lane bookkeeping lives in memory; it is touched only when a lane finishes.
  alignas(32) std::array<double, 4> xs;
  alignas(32) std::array<std::int64_t, 4> ns{}, cl{}, ids{};
  std::array<std::int64_t, 4> slot{};
  std::array<bool, 4> live{};
  std::size_t next = 0;
  for (int l = 0; l < 4; ++l) {
    xs[l] = p.x_init;
    if (next < count) {
      slot[l] = static_cast<std::int64_t>(next);
      ids[l] = static_cast<std::int64_t>(first_id + next);
      live[l] = true;
      ++next;
    } else {
      live[l] = false;
      ids[l] = 0;
    }
  }
  int n_live = 0;
  for (bool b : live) n_live += b ? 1 : 0;

  __m256d x = _mm256_load_pd(xs.data());
  __m256i n = _mm256_load_si256(reinterpret_cast<const __m256i*>(ns.data()));
  __m256i clamped = _mm256_load_si256(reinterpret_cast<const __m256i*>(cl.data()));
  __m256i id = _mm256_load_si256(reinterpret_cast<const __m256i*>(ids.data()));
  auto live_mask = [&]() {
    return _mm256_castsi256_pd(_mm256_set_epi64x(live[3] ? -1 : 0, live[2] ? -1 : 0, live[1] ? -1 : 0,
                                                 live[0] ? -1 : 0));
  };
  __m256d lmask = live_mask();

  // Lanes already out of steps (max_steps == 0) are handled by the finish pass below.
  bool check_first = p.max_steps == 0;
  while (n_live > 0) {
    __m256d stopped = _mm256_and_pd(stop_mask(k, x, n, max_m1), lmask);
    if (!check_first || _mm256_movemask_pd(stopped) == 0) {
      check_first = false;
      const __m256i pair = _mm256_srli_epi64(n, 1);
      Philox4 c{_mm256_and_si256(pair, lo32), _mm256_srli_epi64(pair, 32), _mm256_and_si256(id, lo32),
                _mm256_srli_epi64(id, 32)};
      c = philox_avx2(c, k0, k1);
      const __m256d ua = _mm256_sub_pd(_mm256_set1_pd(1.0), uniform52_avx2(c.c0, c.c1));
      const __m256d ub = uniform52_avx2(c.c2, c.c3);
      const __m256d rr = _mm256_mul_pd(_mm256_set1_pd(-2.0), log_avx2(ua));
      const __m256d rad = _mm256_sqrt_pd(_mm256_blendv_pd(k.zero, rr, _mm256_cmp_pd(rr, k.zero, _CMP_GT_OQ)));
      __m256d sn, cs;
      sincos_2pi_avx2(ub, sn, cs);
      const __m256d z0 = _mm256_mul_pd(rad, cs);
      const __m256d z1 = _mm256_mul_pd(rad, sn);

      __m256d cm;
      x = step_avx2(k, x, z0, cm);
      n = _mm256_add_epi64(n, one_i);
      clamped = _mm256_sub_epi64(clamped, _mm256_castpd_si256(cm));
      const __m256d go = _mm256_andnot_pd(stop_mask(k, x, n, max_m1), lmask);
      const __m256d x2 = step_avx2(k, x, z1, cm);
      x = _mm256_blendv_pd(x, x2, go);
      n = _mm256_sub_epi64(n, _mm256_castpd_si256(go));
      clamped = _mm256_sub_epi64(clamped, _mm256_castpd_si256(_mm256_and_pd(cm, go)));
      stopped = _mm256_and_pd(stop_mask(k, x, n, max_m1), lmask);
      if (_mm256_movemask_pd(stopped) == 0) continue;
    }
    check_first = false;

    const int sm = _mm256_movemask_pd(stopped);
    _mm256_store_pd(xs.data(), x);
    _mm256_store_si256(reinterpret_cast<__m256i*>(ns.data()), n);
    _mm256_store_si256(reinterpret_cast<__m256i*>(cl.data()), clamped);
    _mm256_store_si256(reinterpret_cast<__m256i*>(ids.data()), id);
    for (int l = 0; l < 4; ++l) {
      if (!(sm & (1 << l))) continue;
      WalkOutcome o;
      o.steps = static_cast<std::uint64_t>(ns[l]);
      o.clamped = static_cast<std::uint64_t>(cl[l]);
      if (!std::isfinite(xs[l]))
        o.status = kNonFinite;
      else if (xs[l] >= p.absorb_at)
        o.status = kAbsorbed;
      else
        o.status = kTimedOut;
      out[slot[l]] = o;
      if (next < count) {
        slot[l] = static_cast<std::int64_t>(next);
        ids[l] = static_cast<std::int64_t>(first_id + next);
        ++next;
        xs[l] = p.x_init;
        ns[l] = 0;
        cl[l] = 0;
        if (p.max_steps == 0) check_first = true;
      } else {
        live[l] = false;
        --n_live;
        xs[l] = p.x_init;
        ns[l] = 0;
      }
    }
    x = _mm256_load_pd(xs.data());
    n = _mm256_load_si256(reinterpret_cast<const __m256i*>(ns.data()));
    clamped = _mm256_load_si256(reinterpret_cast<const __m256i*>(cl.data()));
    id = _mm256_load_si256(reinterpret_cast<const __m256i*>(ids.data()));
    lmask = live_mask();
  }
}

}  // namespace sqt::simd
