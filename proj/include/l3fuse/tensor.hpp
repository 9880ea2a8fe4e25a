#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "l3fuse/aligned_buffer.hpp"

namespace l3f {

using Dims4 = std::array<std::size_t, 4>;

// Dense 4-D float tensor, row-major with the last extent innermost.
//
// Activations use batch x channel x row x column; kernels use
// out-channel x in-channel x row x column. Storage is cache-line aligned.
class Tensor4D {
 public:
  Tensor4D() = default;

  // Zero-filled tensor. Throws InvalidDimension if any extent is 0.
  explicit Tensor4D(Dims4 dims);

  static Tensor4D filled(Dims4 dims, float value);
  // Uniform values in [lo, hi); identical for identical (dims, seed).
  static Tensor4D random(Dims4 dims, std::uint64_t seed, float lo = -1.0f,
                         float hi = 1.0f);

  const Dims4& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t axis) const noexcept { return dims_[axis]; }
  std::size_t size() const noexcept { return data_.size(); }

  float* data() noexcept { return data_.data(); }
  const float* data() const noexcept { return data_.data(); }
  std::span<float> values() noexcept { return data_.span(); }
  std::span<const float> values() const noexcept { return data_.span(); }

  std::size_t flatten(const Dims4& index) const noexcept {
    return ((index[0] * dims_[1] + index[1]) * dims_[2] + index[2]) * dims_[3] +
           index[3];
  }
  Dims4 unflatten(std::size_t linear) const noexcept;

  float& operator()(std::size_t i0, std::size_t i1, std::size_t i2,
                    std::size_t i3) noexcept {
    return data_[flatten({i0, i1, i2, i3})];
  }
  float operator()(std::size_t i0, std::size_t i1, std::size_t i2,
                   std::size_t i3) const noexcept {
    return data_[flatten({i0, i1, i2, i3})];
  }

  // Pointer to the (i0, i1) plane of dims[2] x dims[3] values.
  float* plane(std::size_t i0, std::size_t i1) noexcept {
    return data_.data() + (i0 * dims_[1] + i1) * dims_[2] * dims_[3];
  }
  const float* plane(std::size_t i0, std::size_t i1) const noexcept {
    return data_.data() + (i0 * dims_[1] + i1) * dims_[2] * dims_[3];
  }

 private:
  Dims4 dims_{0, 0, 0, 0};
  AlignedBuffer<float> data_;
};

// Either a constant or a seed for deterministic uniform [-1, 1) values.
struct Fill {
  enum class Kind { constant, random } kind = Kind::constant;
  float value = 0.0f;
  std::uint64_t seed = 0;

  static Fill constant(float v) { return {Kind::constant, v, 0}; }
  static Fill random(std::uint64_t s) { return {Kind::random, 0.0f, s}; }
};

Tensor4D new_tensor(Dims4 dims, Fill fill);

// Max |a - ref| divided by max |ref| (0 when both are all-zero).
double max_relative_error(std::span<const float> actual,
                          std::span<const float> reference);

}  // namespace l3f
