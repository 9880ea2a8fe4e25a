#include <cmath>
#include <cstddef>

#if defined(__AVX512F__) || (defined(__AVX2__) && defined(__FMA__))
#include <immintrin.h>
#endif

#include "l3fuse/transform.hpp"

namespace l3f {

// Every output element is acc = fma(a[i][k], b[k][j], acc) for k ascending,
// starting from zero, whichever block or tail path computes it. Results are
// therefore independent of how rows are partitioned between calls.

namespace {

constexpr std::size_t kRowBlock = 6;

#if defined(__AVX512F__)

constexpr std::size_t kLanes = 16;
using Vec = __m512;

inline Vec vzero() { return _mm512_setzero_ps(); }
inline Vec vbroadcast(const float* p) { return _mm512_set1_ps(*p); }
inline Vec vfma(Vec a, Vec b, Vec c) { return _mm512_fmadd_ps(a, b, c); }
inline Vec vload(const float* p, std::size_t n) {
  if (n >= kLanes) return _mm512_loadu_ps(p);
  return _mm512_maskz_loadu_ps(static_cast<__mmask16>((1u << n) - 1), p);
}
inline void vstore(float* p, Vec v, std::size_t n) {
  if (n >= kLanes) _mm512_storeu_ps(p, v);
  else _mm512_mask_storeu_ps(p, static_cast<__mmask16>((1u << n) - 1), v);
}

#elif defined(__AVX2__) && defined(__FMA__)

constexpr std::size_t kLanes = 8;
using Vec = __m256;

inline Vec vzero() { return _mm256_setzero_ps(); }
inline Vec vbroadcast(const float* p) { return _mm256_broadcast_ss(p); }
inline Vec vfma(Vec a, Vec b, Vec c) { return _mm256_fmadd_ps(a, b, c); }
inline __m256i lane_mask(std::size_t n) {
  const __m256i idx = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  return _mm256_cmpgt_epi32(_mm256_set1_epi32(static_cast<int>(n)), idx);
}
inline Vec vload(const float* p, std::size_t n) {
  if (n >= kLanes) return _mm256_loadu_ps(p);
  return _mm256_maskload_ps(p, lane_mask(n));
}
inline void vstore(float* p, Vec v, std::size_t n) {
  if (n >= kLanes) _mm256_storeu_ps(p, v);
  else _mm256_maskstore_ps(p, lane_mask(n), v);
}

#else

// Portable single-lane fallback.
constexpr std::size_t kLanes = 1;
using Vec = float;

inline Vec vzero() { return 0.0f; }
inline Vec vbroadcast(const float* p) { return *p; }
inline Vec vfma(Vec a, Vec b, Vec c) { return std::fma(a, b, c); }
inline Vec vload(const float* p, std::size_t) { return *p; }
inline void vstore(float* p, Vec v, std::size_t) { *p = v; }

#endif

constexpr std::size_t kVecs = kLanes == 1 ? 1 : 2;
constexpr std::size_t kColBlock = kVecs * kLanes;

// MR x (NV vectors) block; `width` < NV * kLanes masks the last vector.
template <std::size_t MR, std::size_t NV>
inline void block(const float* a, std::size_t lda, const float* b, std::size_t ldb,
                  float* c, std::size_t ldc, std::size_t depth, std::size_t width) {
  Vec acc[MR][NV];
  for (std::size_t i = 0; i < MR; ++i)
    for (std::size_t v = 0; v < NV; ++v) acc[i][v] = vzero();
  for (std::size_t k = 0; k < depth; ++k) {
    const float* brow = b + k * ldb;
    Vec bv[NV];
    for (std::size_t v = 0; v < NV; ++v) bv[v] = vload(brow + v * kLanes, width - v * kLanes);
    for (std::size_t i = 0; i < MR; ++i) {
      const Vec av = vbroadcast(a + i * lda + k);
      for (std::size_t v = 0; v < NV; ++v) acc[i][v] = vfma(av, bv[v], acc[i][v]);
    }
  }
  for (std::size_t i = 0; i < MR; ++i)
    for (std::size_t v = 0; v < NV; ++v)
      vstore(c + i * ldc + v * kLanes, acc[i][v], width - v * kLanes);
}

template <std::size_t MR>
inline void row_panel(const float* a, std::size_t lda, const float* b,
                      std::size_t ldb, float* c, std::size_t ldc,
                      std::size_t depth, std::size_t cols) {
  std::size_t j = 0;
  for (; j + kColBlock <= cols; j += kColBlock)
    block<MR, kVecs>(a, lda, b + j, ldb, c + j, ldc, depth, kColBlock);
  for (; j < cols; j += kLanes) {
    const std::size_t width = cols - j < kLanes ? cols - j : kLanes;
    block<MR, 1>(a, lda, b + j, ldb, c + j, ldc, depth, width);
  }
}

}  // namespace

void multiply_rows(const float* lhs, std::size_t lda, const float* rhs,
                   std::size_t ldr, float* dst, std::size_t ldd, std::size_t rows,
                   std::size_t depth, std::size_t cols) {
  std::size_t i = 0;
  for (; i + kRowBlock <= rows; i += kRowBlock)
    row_panel<kRowBlock>(lhs + i * lda, lda, rhs, ldr, dst + i * ldd, ldd, depth,
                         cols);
  for (; i < rows; ++i)
    row_panel<1>(lhs + i * lda, lda, rhs, ldr, dst + i * ldd, ldd, depth, cols);
}

}  // namespace l3f
