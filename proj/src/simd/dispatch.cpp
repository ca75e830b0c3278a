#include <atomic>
#include <cstdlib>
#include <string>

#include "fillgap/errors.hpp"
#include "fillgap/simd/kernels.hpp"

namespace fillgap::simd {

#ifndef FILLGAP_HAVE_AVX2
const Kernels* avx2_kernels() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(FILLGAP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() { return cpu_supports(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

namespace {

const Kernels* table_for(Isa isa) { return isa == Isa::Avx2 ? avx2_kernels() : &scalar_kernels(); }

const Kernels* initial() {
  Isa isa = best_isa();
  if (const char* env = std::getenv("FILLGAP_ISA")) {
    const std::string want(env);
    if (want == "scalar") isa = Isa::Scalar;
    if (want == "avx2" && cpu_supports(Isa::Avx2)) isa = Isa::Avx2;
  }
  return table_for(isa);
}

std::atomic<const Kernels*>& slot() {
  static std::atomic<const Kernels*> s{initial()};
  return s;
}

}  // namespace

const Kernels& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  if (!cpu_supports(isa)) throw ArgumentError("ISA " + std::string(isa_name(isa)) + " not available");
  slot().store(table_for(isa), std::memory_order_release);
}

}  // namespace fillgap::simd
