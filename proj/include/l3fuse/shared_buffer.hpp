#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "l3fuse/aligned_buffer.hpp"

namespace l3f {

// Byte layout of a task's scratch region holding T^2 left-hand matrices
// (S_L = 4RC bytes each) and T^2 result matrices (S_R = 4RC' bytes each) in
// T^2 * max(S_L, S_R) + min(S_L, S_R) bytes.
//
// Left-hand matrices are packed against the end of the region, results grow
// from offset 0. Result i may overwrite left-hand matrices 1..i-1 (already
// consumed) but never left-hand matrices i..T^2. Indices are 1-based.
struct BufferLayout {
  std::size_t positions = 0;
  std::size_t left_bytes = 0;
  std::size_t result_bytes = 0;
  std::size_t capacity = 0;

  std::size_t result_offset(std::size_t i) const noexcept {
    return (i - 1) * result_bytes;
  }
  std::size_t left_offset(std::size_t i) const noexcept {
    return capacity - (positions - i + 1) * left_bytes;
  }
  // Bytes needed when every matrix gets its own storage.
  std::size_t separate_bytes() const noexcept {
    return positions * (left_bytes + result_bytes);
  }

  std::vector<std::size_t> left_offsets() const;
  std::vector<std::size_t> result_offsets() const;
};

// Layout for R tiles per task, C input / C' output channels and tile side T.
BufferLayout buffer_layout(std::size_t tiles_per_task, std::size_t in_channels,
                           std::size_t out_channels, std::size_t tile);
// Layout from raw matrix sizes in bytes.
BufferLayout buffer_layout_bytes(std::size_t positions, std::size_t left_bytes,
                                 std::size_t result_bytes);

// One worker's scratch region. Sizes are multiples of 4 bytes, so offsets
// translate to float indices.
class SharedBuffer {
 public:
  explicit SharedBuffer(const BufferLayout& layout);

  const BufferLayout& layout() const noexcept { return layout_; }
  std::size_t capacity_bytes() const noexcept { return layout_.capacity; }

  float* data() noexcept { return storage_.data(); }
  float* left(std::size_t i) noexcept {
    return storage_.data() + layout_.left_offset(i) / sizeof(float);
  }
  float* result(std::size_t i) noexcept {
    return storage_.data() + layout_.result_offset(i) / sizeof(float);
  }

 private:
  BufferLayout layout_;
  AlignedBuffer<float> storage_;
};

// Checking mode for the overwrite discipline. Tracks, per float slot, which
// matrix currently lives there: 0 = nothing, +i = left-hand matrix i,
// -i = result matrix i. A violation is recorded when a multiplication reads a
// left-hand slot that no longer holds its matrix, when its result lands on a
// left-hand matrix that is still needed (index >= i), or when the inverse
// transform reads a result slot that was clobbered.
class OverwriteTracker {
 public:
  explicit OverwriteTracker(const BufferLayout& layout);

  void begin_task();
  void wrote_left(std::size_t i, std::size_t floats);
  void multiply(std::size_t i, std::size_t left_floats, std::size_t result_floats);
  void read_result(std::size_t i, std::size_t floats);

  std::size_t violations() const noexcept { return violations_; }
  std::int32_t tag(std::size_t float_index) const noexcept { return tags_[float_index]; }
  std::size_t slots() const noexcept { return tags_.size(); }

 private:
  BufferLayout layout_;
  std::vector<std::int32_t> tags_;
  std::size_t violations_ = 0;
};

}  // namespace l3f
