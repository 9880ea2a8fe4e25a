#include <algorithm>
#include <atomic>
#include <barrier>
#include <string>
#include <vector>

#include "engine_internal.hpp"
#include "l3fuse/engines.hpp"
#include "l3fuse/errors.hpp"
#include "l3fuse/tile_plan.hpp"
#include "workers.hpp"

namespace l3f {

namespace {

constexpr std::size_t kTileChunk = 16;
constexpr std::size_t kRowChunk = 96;

}  // namespace

ConvResult conv_three_stage(const Tensor4D& input, const Tensor4D& kernels,
                            const LayerSpec& spec, const EngineConfig& config) {
  config.validate();
  detail::check_kernels(kernels, spec);
  const KernelPack pack =
      transform_kernels(kernels, basis_for(config, static_cast<int>(spec.kernel)));
  return conv_three_stage(input, pack, spec, config);
}

ConvResult conv_three_stage(const Tensor4D& input, const KernelPack& pack,
                            const LayerSpec& spec, const EngineConfig& config) {
  config.validate();
  detail::check_shapes(input, spec);
  detail::check_pack(pack, spec, config.tile);
  const WinogradBasis basis = basis_for(config, static_cast<int>(spec.kernel));
  const TilePlan plan(spec, config.tile);

  const std::size_t n_tile = plan.n_tile();
  const std::size_t positions = pack.positions();
  const std::size_t in_c = spec.in_channels;
  const std::size_t out_c = spec.out_channels;
  const std::size_t bytes = sizeof(float) * n_tile * (in_c + out_c) * positions;

  const std::size_t limit =
      config.memory_limit_bytes.value_or(detail::available_memory_bytes());
  if (limit != 0 && bytes > limit)
    throw AllocationError("three-stage intermediates need " + std::to_string(bytes) +
                              " bytes, only " + std::to_string(limit) + " available",
                          bytes);

  const std::size_t workers = config.resolved_workers();
  const auto start = detail::Clock::now();

  auto lhs = AlignedBuffer<float>::uninitialized(positions * n_tile * in_c);
  auto products = AlignedBuffer<float>::uninitialized(positions * n_tile * out_c);
  ConvResult result{Tensor4D({spec.batch, out_c, spec.out_height(), spec.out_width()}),
                    {}};
  ConvStats& stats = result.stats;

  // Stage 1: every tile into T^2 matrices of n_tile x C.
  auto stage_start = detail::Clock::now();
  {
    std::atomic<std::size_t> cursor{0};
    detail::run_workers(workers, [&](std::size_t) {
      for (std::size_t first; (first = cursor.fetch_add(kTileChunk)) < n_tile;) {
        const std::size_t count = std::min(kTileChunk, n_tile - first);
        const PositionMatrices view{lhs.data() + first * in_c, positions, count,
                                    in_c, in_c, n_tile * in_c};
        forward_transform_tiles(input, plan, basis, first, count, view);
      }
    });
  }
  stats.phase_seconds[0] = detail::seconds_since(stage_start);

  // Stage 2: T^2 products n_tile x C times C x C', one at a time.
  stage_start = detail::Clock::now();
  {
    std::vector<std::atomic<std::size_t>> cursors(positions);
    std::barrier sync(static_cast<std::ptrdiff_t>(workers));
    detail::run_workers(workers, [&](std::size_t) {
      for (std::size_t p = 0; p < positions; ++p) {
        const float* a = lhs.data() + p * n_tile * in_c;
        float* c = products.data() + p * n_tile * out_c;
        for (std::size_t r0; (r0 = cursors[p].fetch_add(kRowChunk)) < n_tile;) {
          const std::size_t rows = std::min(kRowChunk, n_tile - r0);
          multiply_rows(a + r0 * in_c, in_c, pack.matrix(p), out_c, c + r0 * out_c,
                        out_c, rows, in_c, out_c);
        }
        sync.arrive_and_wait();
      }
    });
  }
  stats.phase_seconds[1] = detail::seconds_since(stage_start);

  // Stage 3: inverse transform and scatter.
  stage_start = detail::Clock::now();
  {
    std::atomic<std::size_t> cursor{0};
    detail::run_workers(workers, [&](std::size_t) {
      for (std::size_t first; (first = cursor.fetch_add(kTileChunk)) < n_tile;) {
        const std::size_t count = std::min(kTileChunk, n_tile - first);
        const PositionMatrices view{products.data() + first * out_c, positions, count,
                                    out_c, out_c, n_tile * out_c};
        inverse_transform_tiles(view, basis, plan, first, count, result.output);
      }
    });
  }
  stats.phase_seconds[2] = detail::seconds_since(stage_start);

  stats.wall_seconds = detail::seconds_since(start);
  stats.flops = 2ull * n_tile * in_c * out_c * positions;
  stats.tiles = n_tile;
  stats.workers = workers;
  stats.intermediate_bytes = bytes;
  return result;
}

}  // namespace l3f
