#pragma once

// Reference computations used only by tests. None of these call into the
// engine or transform code paths they are used to check.

#include <cstddef>
#include <vector>

#include "l3fuse/layer.hpp"
#include "l3fuse/tensor.hpp"
#include "l3fuse/winograd.hpp"

namespace l3f::oracle {

// Valid 2-D correlation of an n x n tile with a k x k kernel, in 64-bit.
inline std::vector<double> correlate_valid(const std::vector<double>& x, std::size_t n,
                                           const std::vector<double>& w, std::size_t k) {
  const std::size_t m = n - k + 1;
  std::vector<double> out(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          out[i * m + j] += x[(i + a) * n + j + b] * w[a * k + b];
  return out;
}

// Same in exact rationals.
inline std::vector<Rational> correlate_valid(const std::vector<Rational>& x, std::size_t n,
                                             const std::vector<Rational>& w, std::size_t k) {
  const std::size_t m = n - k + 1;
  std::vector<Rational> out(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          out[i * m + j] += x[(i + a) * n + j + b] * w[a * k + b];
  return out;
}

// Generic dense product of row-major matrices: (r x c) * (c x s).
template <typename T>
std::vector<T> matmul(const std::vector<T>& a, const std::vector<T>& b, std::size_t r,
                      std::size_t c, std::size_t s) {
  std::vector<T> out(r * s);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      T acc{};
      for (std::size_t q = 0; q < c; ++q) acc += a[i * c + q] * b[q * s + j];
      out[i * s + j] = acc;
    }
  return out;
}

template <typename T>
std::vector<T> transpose(const std::vector<T>& a, std::size_t r, std::size_t c) {
  std::vector<T> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a[i * c + j];
  return out;
}

// A^T [(G w G^T) .* (B x B^T)] A in the scalar type of the inputs, built
// from the plain matrix definitions.
template <typename T>
std::vector<T> winograd_tile(const std::vector<T>& A, const std::vector<T>& B,
                             const std::vector<T>& G, std::size_t n, std::size_t k,
                             const std::vector<T>& x, const std::vector<T>& w) {
  const std::size_t m = n - k + 1;
  const auto u = matmul(matmul(G, w, n, k, k), transpose(G, n, k), n, k, n);
  const auto v = matmul(matmul(B, x, n, n, n), transpose(B, n, n), n, n, n);
  std::vector<T> prod(n * n);
  for (std::size_t i = 0; i < n * n; ++i) prod[i] = u[i] * v[i];
  return matmul(matmul(transpose(A, n, m), prod, m, n, n), A, m, n, m);
}

// Copy of `input` with explicit zero borders of pad_lo / pad_hi, plus enough
// extra zeros on the bottom/right that any tile window stays in range.
inline Tensor4D explicit_pad(const Tensor4D& input, std::size_t pad_lo, std::size_t extra) {
  const Dims4 d = input.dims();
  Tensor4D out({d[0], d[1], d[2] + pad_lo + extra, d[3] + pad_lo + extra});
  for (std::size_t b = 0; b < d[0]; ++b)
    for (std::size_t c = 0; c < d[1]; ++c)
      for (std::size_t y = 0; y < d[2]; ++y)
        for (std::size_t x = 0; x < d[3]; ++x)
          out(b, c, y + pad_lo, x + pad_lo) = input(b, c, y, x);
  return out;
}

// Single-channel correlation with implicit padding, 64-bit.
inline std::vector<double> correlate_plane(const Tensor4D& input, std::size_t b,
                                           std::size_t c, const Tensor4D& kernels,
                                           std::size_t cp, const LayerSpec& spec) {
  const std::size_t oh = spec.out_height(), ow = spec.out_width();
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x)
      for (std::size_t a = 0; a < spec.kernel; ++a)
        for (std::size_t e = 0; e < spec.kernel; ++e) {
          const long iy = long(y + a) - long(spec.pad_lo);
          const long ix = long(x + e) - long(spec.pad_lo);
          if (iy < 0 || ix < 0 || iy >= long(spec.in_height) || ix >= long(spec.in_width))
            continue;
          out[y * ow + x] += double(input(b, c, iy, ix)) * double(kernels(cp, c, a, e));
        }
  return out;
}

}  // namespace l3f::oracle
