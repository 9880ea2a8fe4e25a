#include <algorithm>
#include <atomic>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "engine_internal.hpp"
#include "l3fuse/engines.hpp"
#include "l3fuse/errors.hpp"
#include "l3fuse/shared_buffer.hpp"
#include "l3fuse/tile_plan.hpp"
#include "workers.hpp"

namespace l3f {

namespace {

struct WorkerState {
  explicit WorkerState(const BufferLayout& layout, bool instrumented)
      : buffer(layout) {
    if (instrumented) tracker.emplace(layout);
  }

  SharedBuffer buffer;
  std::optional<OverwriteTracker> tracker;
  std::array<double, 3> phase_seconds{};
  std::uint64_t flops = 0;
  std::size_t tasks = 0;
};

}  // namespace

ConvResult conv_fused(const Tensor4D& input, const KernelPack& pack,
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
  const std::size_t per_task = config.tiles_per_task;
  const std::size_t n_task = (n_tile + per_task - 1) / per_task;
  const std::size_t workers = std::min(config.resolved_workers(), n_task);
  const BufferLayout layout = buffer_layout(per_task, in_c, out_c, pack.tile());

  std::vector<std::size_t> order;
  if (config.task_order_seed) {
    order.resize(n_task);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), std::mt19937_64(*config.task_order_seed));
  }

  const auto start = detail::Clock::now();
  ConvResult result{Tensor4D({spec.batch, out_c, spec.out_height(), spec.out_width()}),
                    {}};
  std::vector<WorkerState> states;
  states.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) states.emplace_back(layout, config.instrumented);

  std::atomic<std::size_t> cursor{0};
  detail::run_workers(workers, [&](std::size_t worker) {
    WorkerState& state = states[worker];
    SharedBuffer& buffer = state.buffer;
    OverwriteTracker* tracker = state.tracker ? &*state.tracker : nullptr;

    for (std::size_t claimed; (claimed = cursor.fetch_add(1)) < n_task;) {
      const std::size_t task = order.empty() ? claimed : order[claimed];
      const std::size_t first = task * per_task;
      const std::size_t rows = std::min(per_task, n_tile - first);
      if (tracker) tracker->begin_task();

      auto t0 = detail::Clock::now();
      const PositionMatrices left{buffer.left(1), positions, rows, in_c, in_c,
                                  per_task * in_c};
      forward_transform_tiles(input, plan, basis, first, rows, left);
      if (tracker)
        for (std::size_t i = 1; i <= positions; ++i) tracker->wrote_left(i, rows * in_c);

      auto t1 = detail::Clock::now();
      for (std::size_t i = 1; i <= positions; ++i) {
        if (tracker) tracker->multiply(i, rows * in_c, rows * out_c);
        multiply_rows(buffer.left(i), in_c, pack.matrix(i - 1), out_c, buffer.result(i),
                      out_c, rows, in_c, out_c);
      }
      state.flops += 2ull * rows * in_c * out_c * positions;

      auto t2 = detail::Clock::now();
      if (tracker)
        for (std::size_t i = 1; i <= positions; ++i) tracker->read_result(i, rows * out_c);
      const PositionMatrices products{buffer.result(1), positions, rows, out_c, out_c,
                                      per_task * out_c};
      inverse_transform_tiles(products, basis, plan, first, rows, result.output);
      auto t3 = detail::Clock::now();

      state.phase_seconds[0] += std::chrono::duration<double>(t1 - t0).count();
      state.phase_seconds[1] += std::chrono::duration<double>(t2 - t1).count();
      state.phase_seconds[2] += std::chrono::duration<double>(t3 - t2).count();
      ++state.tasks;
    }
  });

  ConvStats& stats = result.stats;
  stats.wall_seconds = detail::seconds_since(start);
  for (const WorkerState& state : states) {
    for (std::size_t k = 0; k < 3; ++k) stats.phase_seconds[k] += state.phase_seconds[k];
    stats.flops += state.flops;
    stats.tasks += state.tasks;
    if (state.tracker) stats.overwrite_violations += state.tracker->violations();
  }
  stats.tiles = n_tile;
  stats.workers = workers;
  stats.intermediate_bytes = workers * layout.capacity;
  if (config.l2_budget_bytes && layout.capacity > *config.l2_budget_bytes)
    stats.warnings.push_back("shared buffer of " + std::to_string(layout.capacity) +
                             " bytes exceeds the L2 budget of " +
                             std::to_string(*config.l2_budget_bytes) + " bytes");
  return result;
}

}  // namespace l3f
