#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "l3fuse/layer.hpp"
#include "l3fuse/tensor.hpp"

namespace l3f {

struct TileCoord {
  std::size_t index = 0;  // linear index in [0, n_tile)
  std::size_t batch = 0;
  std::size_t row = 0;  // tile row ty
  std::size_t col = 0;  // tile column tx
};

// Overlap-add tiling of a layer. Output tiles of side T' abut and cover the
// output plane (edge tiles are clipped); each reads a T x T input window at
// (ty * T' - pad_lo, tx * T' - pad_lo), so neighbouring windows overlap by
// K - 1. Tiles are numbered batch-major, then row, then column.
class TilePlan {
 public:
  TilePlan(const LayerSpec& spec, int tile);

  const LayerSpec& spec() const noexcept { return spec_; }
  int tile() const noexcept { return tile_; }
  int out_tile() const noexcept { return out_tile_; }
  std::size_t tiles_y() const noexcept { return tiles_y_; }
  std::size_t tiles_x() const noexcept { return tiles_x_; }
  std::size_t n_tile() const noexcept { return n_tile_; }

  TileCoord decode(std::size_t index) const noexcept {
    const std::size_t per_image = tiles_y_ * tiles_x_;
    const std::size_t within = index % per_image;
    return {index, index / per_image, within / tiles_x_, within % tiles_x_};
  }
  std::size_t encode(std::size_t batch, std::size_t row,
                     std::size_t col) const noexcept {
    return (batch * tiles_y_ + row) * tiles_x_ + col;
  }

  std::ptrdiff_t input_row(const TileCoord& t) const noexcept {
    return static_cast<std::ptrdiff_t>(t.row * out_tile_) -
           static_cast<std::ptrdiff_t>(spec_.pad_lo);
  }
  std::ptrdiff_t input_col(const TileCoord& t) const noexcept {
    return static_cast<std::ptrdiff_t>(t.col * out_tile_) -
           static_cast<std::ptrdiff_t>(spec_.pad_lo);
  }

 private:
  LayerSpec spec_;
  int tile_;
  int out_tile_;
  std::size_t tiles_y_;
  std::size_t tiles_x_;
  std::size_t n_tile_;
};

// Throws InvalidParameter when tile <= kernel.
TilePlan plan_tiles(const LayerSpec& spec, int tile);

// Copies the T x T input window of tile `t`, channel `channel` into `dst`
// (row-major). Positions outside the input read as zero.
void gather_input_tile(const Tensor4D& input, const TilePlan& plan,
                       const TileCoord& t, std::size_t channel,
                       std::span<float> dst);

// Stores the T' x T' tile at output origin (ty * T', tx * T'), dropping the
// rows and columns that fall past the output extent.
void scatter_output_tile(Tensor4D& output, const TilePlan& plan,
                         const TileCoord& t, std::size_t channel,
                         std::span<const float> tile);

}  // namespace l3f
