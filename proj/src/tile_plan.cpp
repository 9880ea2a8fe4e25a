#include "l3fuse/tile_plan.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "l3fuse/errors.hpp"

namespace l3f {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

TilePlan::TilePlan(const LayerSpec& spec, int tile) : spec_(spec), tile_(tile) {
  spec_.validate();
  if (tile <= static_cast<int>(spec.kernel))
    throw InvalidParameter("tile size " + std::to_string(tile) +
                           " must exceed kernel size " +
                           std::to_string(spec.kernel));
  out_tile_ = tile - static_cast<int>(spec.kernel) + 1;
  tiles_y_ = ceil_div(spec_.out_height(), static_cast<std::size_t>(out_tile_));
  tiles_x_ = ceil_div(spec_.out_width(), static_cast<std::size_t>(out_tile_));
  n_tile_ = spec_.batch * tiles_y_ * tiles_x_;
}

TilePlan plan_tiles(const LayerSpec& spec, int tile) { return TilePlan(spec, tile); }

void gather_input_tile(const Tensor4D& input, const TilePlan& plan,
                       const TileCoord& t, std::size_t channel,
                       std::span<float> dst) {
  const auto n = static_cast<std::ptrdiff_t>(plan.tile());
  const auto height = static_cast<std::ptrdiff_t>(input.dim(2));
  const auto width = static_cast<std::ptrdiff_t>(input.dim(3));
  const std::ptrdiff_t y0 = plan.input_row(t);
  const std::ptrdiff_t x0 = plan.input_col(t);
  const float* src = input.plane(t.batch, channel);

  if (y0 >= 0 && x0 >= 0 && y0 + n <= height && x0 + n <= width) {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      std::memcpy(dst.data() + i * n, src + (y0 + i) * width + x0,
                  sizeof(float) * n);
    return;
  }

  const std::ptrdiff_t x_begin = std::clamp<std::ptrdiff_t>(-x0, 0, n);
  const std::ptrdiff_t x_end = std::clamp<std::ptrdiff_t>(width - x0, 0, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    float* row = dst.data() + i * n;
    const std::ptrdiff_t y = y0 + i;
    if (y < 0 || y >= height || x_begin >= x_end) {
      std::fill_n(row, n, 0.0f);
      continue;
    }
    std::fill(row, row + x_begin, 0.0f);
    std::memcpy(row + x_begin, src + y * width + x0 + x_begin,
                sizeof(float) * (x_end - x_begin));
    std::fill(row + x_end, row + n, 0.0f);
  }
}

void scatter_output_tile(Tensor4D& output, const TilePlan& plan,
                         const TileCoord& t, std::size_t channel,
                         std::span<const float> tile) {
  const auto m = static_cast<std::size_t>(plan.out_tile());
  const std::size_t height = output.dim(2);
  const std::size_t width = output.dim(3);
  const std::size_t y0 = t.row * m;
  const std::size_t x0 = t.col * m;
  const std::size_t rows = std::min(m, height - y0);
  const std::size_t cols = std::min(m, width - x0);
  float* dst = output.plane(t.batch, channel);
  for (std::size_t i = 0; i < rows; ++i)
    std::memcpy(dst + (y0 + i) * width + x0, tile.data() + i * m,
                sizeof(float) * cols);
}

}  // namespace l3f
