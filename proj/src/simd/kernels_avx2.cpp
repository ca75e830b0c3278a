// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cstring>

#include "fillgap/simd/kernels.hpp"

namespace fillgap::simd {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void transposition(const double* f, double* y, const std::uint32_t* nb, const std::uint8_t* code, const double* diag,
                   const double* off, double coeff, bool accumulate, std::size_t count) {
  const __m256d c = _mm256_set1_pd(coeff);
  std::size_t x = 0;
  for (; x + 4 <= count; x += 4) {
    const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(nb + x));
    std::int32_t packed;
    std::memcpy(&packed, code + x, sizeof packed);
    const __m128i cidx = _mm_cvtepu8_epi32(_mm_cvtsi32_si128(packed));
    const __m256d fx = _mm256_loadu_pd(f + x);
    const __m256d fn = _mm256_i32gather_pd(f, idx, 8);
    const __m256d d = _mm256_i32gather_pd(diag, cidx, 8);
    const __m256d o = _mm256_i32gather_pd(off, cidx, 8);
    const __m256d t = _mm256_fmadd_pd(o, fn, _mm256_mul_pd(d, fx));
    const __m256d v = accumulate ? _mm256_fmadd_pd(c, t, _mm256_loadu_pd(y + x)) : _mm256_mul_pd(c, t);
    _mm256_storeu_pd(y + x, v);
  }
  for (; x < count; ++x) {
    const double v = coeff * (diag[code[x]] * f[x] + off[code[x]] * f[nb[x]]);
    y[x] = accumulate ? y[x] + v : v;
  }
}

double dot(const double* a, const double* b, std::size_t count) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < count; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot(const double* a, const double* b, const double* w, std::size_t count) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)), _mm256_loadu_pd(w + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)),
                         _mm256_loadu_pd(w + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < count; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t count) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < count; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t count) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(a, _mm256_loadu_pd(x + i)));
  for (; i < count; ++i) x[i] *= alpha;
}

constexpr Kernels kAvx2{Isa::Avx2, "avx2", transposition, dot, weighted_dot, axpy, scale};

}  // namespace

const Kernels* avx2_kernels() { return &kAvx2; }

}  // namespace fillgap::simd
