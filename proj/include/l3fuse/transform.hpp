#pragma once

#include <cstddef>
#include <cstdint>

#include "l3fuse/aligned_buffer.hpp"
#include "l3fuse/tensor.hpp"
#include "l3fuse/tile_plan.hpp"
#include "l3fuse/winograd.hpp"

namespace l3f {

// T^2 right-hand matrices, one per transformed tile position p, each
// C x C' row-major, stored back to back: entry (p, c, c') is element p of
// G W[c', c] G^T. Read-only once built.
class KernelPack {
 public:
  KernelPack() = default;
  KernelPack(int tile, std::size_t in_channels, std::size_t out_channels);

  int tile() const noexcept { return tile_; }
  std::size_t positions() const noexcept {
    return static_cast<std::size_t>(tile_) * static_cast<std::size_t>(tile_);
  }
  std::size_t in_channels() const noexcept { return in_channels_; }
  std::size_t out_channels() const noexcept { return out_channels_; }
  std::size_t bytes() const noexcept { return data_.size() * sizeof(float); }

  const float* matrix(std::size_t p) const noexcept {
    return data_.data() + p * in_channels_ * out_channels_;
  }
  float* matrix(std::size_t p) noexcept {
    return data_.data() + p * in_channels_ * out_channels_;
  }
  float at(std::size_t p, std::size_t c, std::size_t cp) const noexcept {
    return matrix(p)[c * out_channels_ + cp];
  }
  const float* data() const noexcept { return data_.data(); }

 private:
  int tile_ = 0;
  std::size_t in_channels_ = 0;
  std::size_t out_channels_ = 0;
  AlignedBuffer<float> data_;
};

// View of T^2 row-major matrices (rows x cols, row stride `ld`) placed
// `stride` floats apart. Used for left-hand blocks (rows = tiles, cols = C)
// and result blocks (cols = C').
struct PositionMatrices {
  float* data = nullptr;
  std::size_t positions = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t ld = 0;
  std::size_t stride = 0;

  float* matrix(std::size_t p) const noexcept { return data + p * stride; }
  float& at(std::size_t p, std::size_t r, std::size_t c) const noexcept {
    return data[p * stride + r * ld + c];
  }
};

// Kernel transform; computed in 64-bit and rounded once. Throws ShapeMismatch
// when the kernel extent differs from the basis.
KernelPack transform_kernels(const Tensor4D& kernels, const WinogradBasis& basis);

// dst(p, r, c) = element p of B x B^T for x = input tile first_tile + r,
// channel c. Requires dst.rows >= count and dst.cols == C.
void forward_transform_tiles(const Tensor4D& input, const TilePlan& plan,
                             const WinogradBasis& basis, std::size_t first_tile,
                             std::size_t count, const PositionMatrices& dst);

// For each tile r and channel c': M(i, j) = src(p = i*T + j, r, c'),
// out = A^T M A, scattered into `output`.
void inverse_transform_tiles(const PositionMatrices& src, const WinogradBasis& basis,
                             const TilePlan& plan, std::size_t first_tile,
                             std::size_t count, Tensor4D& output);

// dst_p = lhs_p * pack_p for every position. Returns the FLOP count,
// 2 * rows * C * C' * T^2.
std::uint64_t multiply_block(const PositionMatrices& lhs, const KernelPack& pack,
                             const PositionMatrices& dst);

// dst (rows x cols, stride ldd) = lhs (rows x depth, stride lda) *
// rhs (depth x cols, stride ldr), single-precision accumulation. Every output
// element is summed over depth in ascending order with the same operation
// sequence regardless of where its row falls in a block, so any row
// partitioning of a product gives bit-identical results.
void multiply_rows(const float* lhs, std::size_t lda, const float* rhs,
                   std::size_t ldr, float* dst, std::size_t ldd, std::size_t rows,
                   std::size_t depth, std::size_t cols);

// Single-tile helpers working on row-major T x T (or T' x T') arrays.
void transform_input_tile(const WinogradBasis& basis, const float* tile, float* out);
void inverse_transform_tile(const WinogradBasis& basis, const float* tile, float* out);

}  // namespace l3f
