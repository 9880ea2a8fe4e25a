#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l3fuse/layer.hpp"
#include "l3fuse/tensor.hpp"
#include "l3fuse/transform.hpp"
#include "l3fuse/winograd.hpp"

namespace l3f {

enum class EngineKind { direct, three_stage, fused };

std::string_view to_string(EngineKind kind);
// Accepts "direct", "three_stage" (or "3stage") and "fused".
EngineKind parse_engine(std::string_view name);

struct EngineConfig {
  EngineKind kind = EngineKind::fused;
  int tile = 7;
  std::size_t tiles_per_task = 24;  // R, fused only
  std::size_t workers = 1;          // 0 = hardware concurrency
  std::optional<std::vector<Rational>> points;

  // Checking mode: track the shared-buffer overwrite discipline.
  bool instrumented = false;
  // Claim tasks in a seeded random permutation instead of ascending order.
  std::optional<std::uint64_t> task_order_seed;
  // Fused: warn in stats when a worker's scratch exceeds this many bytes.
  std::optional<std::size_t> l2_budget_bytes;
  // Three-stage: refuse intermediates larger than this (default: free RAM).
  std::optional<std::size_t> memory_limit_bytes;

  // Throws InvalidParameter unless T is in [4, 8] and R >= 1 for fused.
  void validate() const;
  std::size_t resolved_workers() const;
};

struct ConvStats {
  double wall_seconds = 0.0;
  // Three-stage: wall time per stage. Fused: per-phase time summed over
  // workers (forward, multiply, inverse). Direct: unused.
  std::array<double, 3> phase_seconds{};
  std::uint64_t flops = 0;
  std::size_t tiles = 0;
  std::size_t tasks = 0;
  std::size_t workers = 1;
  std::size_t intermediate_bytes = 0;
  std::size_t overwrite_violations = 0;
  std::vector<std::string> warnings;
};

struct ConvResult {
  Tensor4D output;
  ConvStats stats;
};

// Seven-loop cross-correlation with implicit zero padding, accumulated in
// 64-bit. The reference every other engine is checked against.
ConvResult conv_direct(const Tensor4D& input, const Tensor4D& kernels,
                       const LayerSpec& spec);

// Transform all tiles, run T^2 large multiplications one after another, then
// inverse-transform everything. Intermediates: 4 * n_tile * (C + C') * T^2
// bytes. Throws AllocationError when they do not fit.
ConvResult conv_three_stage(const Tensor4D& input, const KernelPack& pack,
                            const LayerSpec& spec, const EngineConfig& config);
ConvResult conv_three_stage(const Tensor4D& input, const Tensor4D& kernels,
                            const LayerSpec& spec, const EngineConfig& config);

// Tasks of R tiles run on a worker pool; each worker keeps every
// intermediate in its own shared buffer. Output is bit-identical to
// conv_three_stage for the same basis.
ConvResult conv_fused(const Tensor4D& input, const KernelPack& pack,
                      const LayerSpec& spec, const EngineConfig& config);

// Dispatch on config.kind; transforms the kernels when needed.
ConvResult convolve(const Tensor4D& input, const Tensor4D& kernels,
                    const LayerSpec& spec, const EngineConfig& config);

WinogradBasis basis_for(const EngineConfig& config, int kernel);

}  // namespace l3f
