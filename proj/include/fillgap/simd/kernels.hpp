#pragma once

// Inner loops over the n! states.
//
// Every kernel has a scalar reference version and, on x86-64, an AVX2/FMA
// version. The active table is chosen once at startup from the CPU features
// (override with FILLGAP_ISA=scalar|avx2) and can be switched by tests.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace fillgap::simd {

enum class Isa { Scalar, Avx2 };

struct Kernels {
  Isa isa;
  std::string_view name;

  // y[x] (+)= coeff * (diag[code[x]] * f[x] + off[code[x]] * f[nb[x]])
  // One adjacent transposition applied to every state: nb is the neighbour
  // index x^{tau_r}, code the pair of labels being compared.
  void (*transposition)(const double* f, double* y, const std::uint32_t* nb, const std::uint8_t* code,
                        const double* diag, const double* off, double coeff, bool accumulate, std::size_t count);

  double (*dot)(const double* a, const double* b, std::size_t count);
  // sum a[x] b[x] w[x]
  double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t count);
  // y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t count);
  void (*scale)(double alpha, double* x, std::size_t count);
};

const Kernels& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in.
const Kernels* avx2_kernels();

bool cpu_supports(Isa isa);
Isa best_isa();

const Kernels& active();
// Throws ArgumentError if the ISA is unavailable on this build or CPU.
void select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace fillgap::simd
