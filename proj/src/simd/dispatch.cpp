#include <cstdlib>
#include <string>

#include "sqt/error.hpp"
#include "sqt/simd/kernel.hpp"

namespace sqt::simd {

#ifndef SQT_HAVE_AVX2
void walk_avx2(const DriftTable&, const WalkParams&, std::uint64_t, std::size_t, WalkOutcome*) {
  throw DomainError("AVX2 kernel not built for this target");
}
#endif

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SQT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa parse_isa(const char* name) {
  const std::string s = name ? name : "";
  if (s == "scalar") return Isa::Scalar;
  if (s == "avx2") return Isa::Avx2;
  throw ConfigError("unknown ISA '" + s + "' (expected scalar or avx2)");
}

Isa detect_isa() {
  if (const char* forced = std::getenv("SQT_FORCE_ISA"); forced && *forced) {
    const Isa isa = parse_isa(forced);
    if (!isa_supported(isa)) throw ConfigError(std::string("forced ISA not supported here: ") + forced);
    return isa;
  }
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

void walk(Isa isa, const DriftTable& table, const WalkParams& p, std::uint64_t first_id, std::size_t count,
          WalkOutcome* out) {
  if (isa == Isa::Avx2) {
    if (!isa_supported(Isa::Avx2)) throw DomainError("AVX2 requested but not supported by this CPU");
    walk_avx2(table, p, first_id, count, out);
  } else {
    walk_scalar(table, p, first_id, count, out);
  }
}

}  // namespace sqt::simd
