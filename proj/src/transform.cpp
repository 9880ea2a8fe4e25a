#include "l3fuse/transform.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "l3fuse/errors.hpp"

namespace l3f {

namespace {

constexpr std::size_t kMaxPositions = kMaxTile * kMaxTile;

// dst (r x r) = L (r x c) * X (c x c) * L^T. kR / kC are compile-time sizes
// when positive; otherwise the runtime r / c are used.
template <int kR, int kC>
inline void sandwich(const float* L, const float* X, float* dst, int r_rt, int c_rt) {
  const int r = kR > 0 ? kR : r_rt;
  const int c = kC > 0 ? kC : c_rt;
  float tmp[kMaxTile * kMaxTile];
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      float s = 0.0f;
      for (int k = 0; k < c; ++k) s += L[i * c + k] * X[k * c + j];
      tmp[i * c + j] = s;
    }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      float s = 0.0f;
      for (int k = 0; k < c; ++k) s += tmp[i * c + k] * L[j * c + k];
      dst[i * r + j] = s;
    }
}

using SandwichFn = void (*)(const float*, const float*, float*, int, int);

SandwichFn pick_square(int n) {
  switch (n) {
    case 4: return &sandwich<4, 4>;
    case 5: return &sandwich<5, 5>;
    case 6: return &sandwich<6, 6>;
    case 7: return &sandwich<7, 7>;
    case 8: return &sandwich<8, 8>;
    default: return &sandwich<0, 0>;
  }
}

SandwichFn pick_inverse(int out, int n) {
  if (out == n - 2) {
    switch (n) {
      case 4: return &sandwich<2, 4>;
      case 5: return &sandwich<3, 5>;
      case 6: return &sandwich<4, 6>;
      case 7: return &sandwich<5, 7>;
      case 8: return &sandwich<6, 8>;
      default: break;
    }
  }
  return &sandwich<0, 0>;
}

// Channel-blocked variant: X and dst hold kLanes independent tiles, element
// (i, j) of lane l at [(i * size + j) * kLanes + l]. Each lane performs the
// same operation sequence as the single-tile sandwich.
constexpr std::size_t kLanes = 16;

template <int kR, int kC>
inline void lane_sandwich(const float* L, const float* X, float* dst, int r_rt, int c_rt) {
  const int r = kR > 0 ? kR : r_rt;
  const int c = kC > 0 ? kC : c_rt;
  alignas(64) float tmp[kMaxPositions * kLanes];
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) {
      float s[kLanes] = {};
      for (int k = 0; k < c; ++k) {
        const float coef = L[i * c + k];
        const float* x = X + (k * c + j) * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) s[l] += coef * x[l];
      }
      std::copy_n(s, kLanes, tmp + (i * c + j) * kLanes);
    }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      float s[kLanes] = {};
      for (int k = 0; k < c; ++k) {
        const float coef = L[j * c + k];
        const float* t = tmp + (i * c + k) * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) s[l] += t[l] * coef;
      }
      std::copy_n(s, kLanes, dst + (i * r + j) * kLanes);
    }
}

using LaneSandwichFn = void (*)(const float*, const float*, float*, int, int);

LaneSandwichFn pick_lane_square(int n) {
  switch (n) {
    case 4: return &lane_sandwich<4, 4>;
    case 5: return &lane_sandwich<5, 5>;
    case 6: return &lane_sandwich<6, 6>;
    case 7: return &lane_sandwich<7, 7>;
    case 8: return &lane_sandwich<8, 8>;
    default: return &lane_sandwich<0, 0>;
  }
}

LaneSandwichFn pick_lane_inverse(int out, int n) {
  if (out == n - 2) {
    switch (n) {
      case 4: return &lane_sandwich<2, 4>;
      case 5: return &lane_sandwich<3, 5>;
      case 6: return &lane_sandwich<4, 6>;
      case 7: return &lane_sandwich<5, 7>;
      case 8: return &lane_sandwich<6, 8>;
      default: break;
    }
  }
  return &lane_sandwich<0, 0>;
}

// A^T as a row-major T' x T array.
std::array<float, kMaxPositions> transpose_a(const WinogradBasis& basis) {
  const int n = basis.tile();
  const int m = basis.out_tile();
  std::array<float, kMaxPositions> at{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) at[j * n + i] = basis.a()[i * m + j];
  return at;
}

}  // namespace

KernelPack::KernelPack(int tile, std::size_t in_channels, std::size_t out_channels)
    : tile_(tile),
      in_channels_(in_channels),
      out_channels_(out_channels),
      data_(static_cast<std::size_t>(tile) * tile * in_channels * out_channels) {}

KernelPack transform_kernels(const Tensor4D& kernels, const WinogradBasis& basis) {
  const auto k = static_cast<std::size_t>(basis.kernel());
  if (kernels.dim(2) != k || kernels.dim(3) != k)
    throw ShapeMismatch("kernel extent " + std::to_string(kernels.dim(2)) + "x" +
                        std::to_string(kernels.dim(3)) + " does not match basis K=" +
                        std::to_string(k));
  const auto n = static_cast<std::size_t>(basis.tile());
  const std::size_t out_channels = kernels.dim(0);
  const std::size_t in_channels = kernels.dim(1);
  KernelPack pack(basis.tile(), in_channels, out_channels);
  const std::span<const double> g = basis.g64();

  std::vector<double> gw(n * k);
  for (std::size_t cp = 0; cp < out_channels; ++cp) {
    for (std::size_t c = 0; c < in_channels; ++c) {
      const float* w = kernels.plane(cp, c);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          double s = 0.0;
          for (std::size_t q = 0; q < k; ++q) s += g[i * k + q] * w[q * k + j];
          gw[i * k + j] = s;
        }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t q = 0; q < k; ++q) s += gw[i * k + q] * g[j * k + q];
          pack.matrix(i * n + j)[c * out_channels + cp] = static_cast<float>(s);
        }
    }
  }
  return pack;
}

void transform_input_tile(const WinogradBasis& basis, const float* tile, float* out) {
  const int n = basis.tile();
  pick_square(n)(basis.b().data(), tile, out, n, n);
}

void inverse_transform_tile(const WinogradBasis& basis, const float* tile, float* out) {
  const int n = basis.tile();
  const int m = basis.out_tile();
  const auto at = transpose_a(basis);
  pick_inverse(m, n)(at.data(), tile, out, m, n);
}

void forward_transform_tiles(const Tensor4D& input, const TilePlan& plan,
                             const WinogradBasis& basis, std::size_t first_tile,
                             std::size_t count, const PositionMatrices& dst) {
  const int n = basis.tile();
  const auto positions = static_cast<std::size_t>(n * n);
  const std::size_t channels = input.dim(1);
  const LaneSandwichFn transform = pick_lane_square(n);
  const float* b = basis.b().data();
  std::array<float, kMaxPositions> tile{};
  alignas(64) std::array<float, kMaxPositions * kLanes> in{};
  alignas(64) std::array<float, kMaxPositions * kLanes> out{};

  for (std::size_t r = 0; r < count; ++r) {
    const TileCoord coord = plan.decode(first_tile + r);
    float* row = dst.data + r * dst.ld;
    for (std::size_t c0 = 0; c0 < channels; c0 += kLanes) {
      const std::size_t lanes = std::min(kLanes, channels - c0);
      for (std::size_t l = 0; l < lanes; ++l) {
        gather_input_tile(input, plan, coord, c0 + l, {tile.data(), positions});
        for (std::size_t p = 0; p < positions; ++p) in[p * kLanes + l] = tile[p];
      }
      transform(b, in.data(), out.data(), n, n);
      for (std::size_t p = 0; p < positions; ++p)
        std::copy_n(&out[p * kLanes], lanes, row + p * dst.stride + c0);
    }
  }
}

void inverse_transform_tiles(const PositionMatrices& src, const WinogradBasis& basis,
                             const TilePlan& plan, std::size_t first_tile,
                             std::size_t count, Tensor4D& output) {
  const int n = basis.tile();
  const int m = basis.out_tile();
  const auto positions = static_cast<std::size_t>(n * n);
  const auto out_positions = static_cast<std::size_t>(m * m);
  const std::size_t channels = output.dim(1);
  const auto at = transpose_a(basis);
  const LaneSandwichFn transform = pick_lane_inverse(m, n);
  std::array<float, kMaxPositions> tile{};
  alignas(64) std::array<float, kMaxPositions * kLanes> in{};
  alignas(64) std::array<float, kMaxPositions * kLanes> out{};

  for (std::size_t r = 0; r < count; ++r) {
    const TileCoord coord = plan.decode(first_tile + r);
    const float* row = src.data + r * src.ld;
    for (std::size_t c0 = 0; c0 < channels; c0 += kLanes) {
      const std::size_t lanes = std::min(kLanes, channels - c0);
      for (std::size_t p = 0; p < positions; ++p)
        std::copy_n(row + p * src.stride + c0, lanes, &in[p * kLanes]);
      transform(at.data(), in.data(), out.data(), m, n);
      for (std::size_t l = 0; l < lanes; ++l) {
        for (std::size_t p = 0; p < out_positions; ++p) tile[p] = out[p * kLanes + l];
        scatter_output_tile(output, plan, coord, c0 + l, {tile.data(), out_positions});
      }
    }
  }
}

std::uint64_t multiply_block(const PositionMatrices& lhs, const KernelPack& pack,
                             const PositionMatrices& dst) {
  const std::size_t depth = pack.in_channels();
  const std::size_t cols = pack.out_channels();
  for (std::size_t p = 0; p < pack.positions(); ++p)
    multiply_rows(lhs.matrix(p), lhs.ld, pack.matrix(p), cols, dst.matrix(p), dst.ld,
                  lhs.rows, depth, cols);
  return 2ull * lhs.rows * depth * cols * pack.positions();
}

}  // namespace l3f
