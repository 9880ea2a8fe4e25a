#include "l3fuse/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "l3fuse/errors.hpp"

namespace l3f {

namespace {

std::size_t checked_volume(const Dims4& dims) {
  std::size_t volume = 1;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    if (dims[axis] == 0)
      throw InvalidDimension("tensor extent " + std::to_string(axis) +
                             " is zero");
    volume *= dims[axis];
  }
  return volume;
}

}  // namespace

Tensor4D::Tensor4D(Dims4 dims) : dims_(dims), data_(checked_volume(dims)) {}

Tensor4D Tensor4D::filled(Dims4 dims, float value) {
  Tensor4D t(dims);
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor4D Tensor4D::random(Dims4 dims, std::uint64_t seed, float lo, float hi) {
  Tensor4D t(dims);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  for (float& v : t.data_) v = dist(rng);
  return t;
}

Dims4 Tensor4D::unflatten(std::size_t linear) const noexcept {
  Dims4 index{};
  for (std::size_t axis = 4; axis-- > 0;) {
    index[axis] = linear % dims_[axis];
    linear /= dims_[axis];
  }
  return index;
}

Tensor4D new_tensor(Dims4 dims, Fill fill) {
  if (fill.kind == Fill::Kind::random) return Tensor4D::random(dims, fill.seed);
  return Tensor4D::filled(dims, fill.value);
}

double max_relative_error(std::span<const float> actual,
                          std::span<const float> reference) {
  if (actual.size() != reference.size())
    throw ShapeMismatch("max_relative_error: size mismatch");
  double max_diff = 0.0;
  double max_ref = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double ref = reference[i];
    max_diff = std::max(max_diff, std::abs(double(actual[i]) - ref));
    max_ref = std::max(max_ref, std::abs(ref));
  }
  if (max_ref == 0.0) return max_diff;
  return max_diff / max_ref;
}

}  // namespace l3f
