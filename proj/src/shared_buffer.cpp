#include "l3fuse/shared_buffer.hpp"

#include <algorithm>

#include "l3fuse/errors.hpp"

namespace l3f {

std::vector<std::size_t> BufferLayout::left_offsets() const {
  std::vector<std::size_t> out(positions);
  for (std::size_t i = 1; i <= positions; ++i) out[i - 1] = left_offset(i);
  return out;
}

std::vector<std::size_t> BufferLayout::result_offsets() const {
  std::vector<std::size_t> out(positions);
  for (std::size_t i = 1; i <= positions; ++i) out[i - 1] = result_offset(i);
  return out;
}

BufferLayout buffer_layout_bytes(std::size_t positions, std::size_t left_bytes,
                                 std::size_t result_bytes) {
  if (positions == 0 || left_bytes == 0 || result_bytes == 0)
    throw InvalidParameter("buffer layout parameters must be positive");
  BufferLayout layout;
  layout.positions = positions;
  layout.left_bytes = left_bytes;
  layout.result_bytes = result_bytes;
  layout.capacity = positions * std::max(left_bytes, result_bytes) +
                    std::min(left_bytes, result_bytes);
  return layout;
}

BufferLayout buffer_layout(std::size_t tiles_per_task, std::size_t in_channels,
                           std::size_t out_channels, std::size_t tile) {
  if (tiles_per_task == 0 || in_channels == 0 || out_channels == 0 || tile == 0)
    throw InvalidParameter("buffer layout parameters must be positive");
  return buffer_layout_bytes(tile * tile, sizeof(float) * tiles_per_task * in_channels,
                             sizeof(float) * tiles_per_task * out_channels);
}

SharedBuffer::SharedBuffer(const BufferLayout& layout)
    : layout_(layout), storage_(layout.capacity / sizeof(float)) {}

OverwriteTracker::OverwriteTracker(const BufferLayout& layout)
    : layout_(layout), tags_(layout.capacity / sizeof(float), 0) {}

void OverwriteTracker::begin_task() { std::fill(tags_.begin(), tags_.end(), 0); }

void OverwriteTracker::wrote_left(std::size_t i, std::size_t floats) {
  const std::size_t base = layout_.left_offset(i) / sizeof(float);
  std::fill_n(tags_.begin() + base, floats, static_cast<std::int32_t>(i));
}

void OverwriteTracker::multiply(std::size_t i, std::size_t left_floats,
                                std::size_t result_floats) {
  const auto idx = static_cast<std::int32_t>(i);
  const std::size_t left = layout_.left_offset(i) / sizeof(float);
  if (std::any_of(tags_.begin() + left, tags_.begin() + left + left_floats,
                  [idx](std::int32_t t) { return t != idx; }))
    ++violations_;

  const std::size_t result = layout_.result_offset(i) / sizeof(float);
  auto first = tags_.begin() + result;
  auto last = first + result_floats;
  if (std::any_of(first, last, [idx](std::int32_t t) { return t >= idx; }))
    ++violations_;
  std::fill(first, last, -idx);
}

void OverwriteTracker::read_result(std::size_t i, std::size_t floats) {
  const auto idx = static_cast<std::int32_t>(i);
  const std::size_t result = layout_.result_offset(i) / sizeof(float);
  if (std::any_of(tags_.begin() + result, tags_.begin() + result + floats,
                  [idx](std::int32_t t) { return t != -idx; }))
    ++violations_;
}

}  // namespace l3f
