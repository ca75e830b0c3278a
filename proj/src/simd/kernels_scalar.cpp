#include "fillgap/simd/kernels.hpp"

namespace fillgap::simd {

namespace {

void transposition(const double* f, double* y, const std::uint32_t* nb, const std::uint8_t* code, const double* diag,
                   const double* off, double coeff, bool accumulate, std::size_t count) {
  for (std::size_t x = 0; x < count; ++x) {
    const double v = coeff * (diag[code[x]] * f[x] + off[code[x]] * f[nb[x]]);
    y[x] = accumulate ? y[x] + v : v;
  }
}

double dot(const double* a, const double* b, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t count) {
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) x[i] *= alpha;
}

constexpr Kernels kScalar{Isa::Scalar, "scalar", transposition, dot, weighted_dot, axpy, scale};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace fillgap::simd
