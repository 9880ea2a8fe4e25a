#pragma once

#include <chrono>

#include "l3fuse/layer.hpp"
#include "l3fuse/tensor.hpp"
#include "l3fuse/transform.hpp"

namespace l3f::detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_shapes(const Tensor4D& input, const LayerSpec& spec);
void check_kernels(const Tensor4D& kernels, const LayerSpec& spec);
void check_pack(const KernelPack& pack, const LayerSpec& spec, int tile);

}  // namespace l3f::detail
