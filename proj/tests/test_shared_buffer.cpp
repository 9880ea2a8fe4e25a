#include <doctest.h>

#include <cstdint>

#include "l3fuse/errors.hpp"
#include "l3fuse/shared_buffer.hpp"

using namespace l3f;

TEST_CASE("equal matrix sizes: 40 slots, 37.5% saved") {
  // T^2 = 4, S_L = S_R = 32 bytes: R = 1, C = C' = 8, T = 2.
  const BufferLayout layout = buffer_layout(1, 8, 8, 2);
  CHECK(layout.capacity == 160);
  CHECK(layout.capacity / 4 == 40);
  CHECK(layout.separate_bytes() == 256);
  CHECK(1.0 - double(layout.capacity) / double(layout.separate_bytes()) == 0.375);
  CHECK(layout.result_offsets() == std::vector<std::size_t>{0, 32, 64, 96});
  CHECK(layout.left_offsets() == std::vector<std::size_t>{32, 64, 96, 128});
}

TEST_CASE("unequal matrix sizes: 46 slots vs 64") {
  const BufferLayout layout = buffer_layout_bytes(4, 24, 40);
  CHECK(layout.capacity == 184);
  CHECK(layout.capacity / 4 == 46);
  CHECK(layout.separate_bytes() / 4 == 64);
  CHECK(1.0 - double(layout.capacity) / double(layout.separate_bytes()) == 0.28125);
  CHECK(buffer_layout(1, 6, 10, 2).capacity == 184);
}

TEST_CASE("left-hand matrices end flush with the buffer") {
  const BufferLayout layout = buffer_layout(24, 64, 32, 7);
  CHECK(layout.left_offset(49) + layout.left_bytes == layout.capacity);
  for (std::size_t i = 1; i < 49; ++i)
    CHECK(layout.left_offset(i + 1) - layout.left_offset(i) == layout.left_bytes);
}

TEST_CASE("no result overlaps its own or a later left-hand matrix") {
  for (std::size_t R = 1; R <= 64; R += 7)
    for (std::size_t C = 8; C <= 512; C *= 2)
      for (std::size_t Cp = 8; Cp <= 512; Cp *= 4)
        for (std::size_t T = 4; T <= 8; ++T) {
          const BufferLayout l = buffer_layout(R, C, Cp, T);
          for (std::size_t i = 1; i <= T * T; ++i)
            REQUIRE(l.result_offset(i) + l.result_bytes <= l.left_offset(i));
        }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(buffer_layout(0, 1, 1, 4), InvalidParameter);
  CHECK_THROWS_AS(buffer_layout_bytes(4, 0, 8), InvalidParameter);
}

TEST_CASE("shared buffer storage") {
  const BufferLayout layout = buffer_layout(3, 5, 7, 4);
  SharedBuffer buffer(layout);
  CHECK(buffer.capacity_bytes() == layout.capacity);
  CHECK(reinterpret_cast<std::uintptr_t>(buffer.data()) % kCacheLine == 0);
  CHECK(buffer.left(16) + 15 == buffer.data() + layout.capacity / 4);
  CHECK(buffer.result(2) == buffer.data() + 21);
}

namespace {

// Replays one task the way the fused engine does.
std::size_t replay(const BufferLayout& layout, OverwriteTracker& tracker, std::size_t rows,
                   std::size_t c, std::size_t cp) {
  tracker.begin_task();
  for (std::size_t i = 1; i <= layout.positions; ++i) tracker.wrote_left(i, rows * c);
  for (std::size_t i = 1; i <= layout.positions; ++i) tracker.multiply(i, rows * c, rows * cp);
  for (std::size_t i = 1; i <= layout.positions; ++i) tracker.read_result(i, rows * cp);
  return tracker.violations();
}

}  // namespace

TEST_CASE("overwrite tracker accepts the discipline") {
  for (auto [c, cp] : {std::pair{8, 8}, {6, 10}, {10, 6}, {64, 128}, {128, 64}}) {
    const BufferLayout layout = buffer_layout(4, c, cp, 5);
    OverwriteTracker tracker(layout);
    CHECK(replay(layout, tracker, 4, c, cp) == 0);
    CHECK(replay(layout, tracker, 3, c, cp) == 0);  // short final task
  }
}

TEST_CASE("overwrite tracker catches a layout that is too small") {
  BufferLayout layout = buffer_layout(4, 10, 16, 4);
  layout.capacity -= 8;  // shifts every left-hand matrix into result space
  OverwriteTracker tracker(layout);
  CHECK(replay(layout, tracker, 4, 10, 16) > 0);
}

TEST_CASE("after all multiplications results are contiguous from offset 0") {
  // S_R <= S_L: results 1..T^2 fill [0, T^2 S_R) and the last left-hand
  // matrix is still intact.
  const BufferLayout layout = buffer_layout(2, 12, 8, 4);
  OverwriteTracker tracker(layout);
  tracker.begin_task();
  for (std::size_t i = 1; i <= 16; ++i) tracker.wrote_left(i, 24);
  for (std::size_t i = 1; i <= 16; ++i) tracker.multiply(i, 24, 16);
  CHECK(tracker.violations() == 0);
  for (std::size_t f = 0; f < 16 * 16; ++f)
    REQUIRE(tracker.tag(f) == -static_cast<std::int32_t>(f / 16 + 1));
  const std::size_t last = layout.left_offset(16) / 4;
  for (std::size_t f = last; f < last + 24; ++f) REQUIRE(tracker.tag(f) == 16);
}
