#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace l3f::detail {

// Runs fn(worker_id) on `count` workers (the caller is worker 0) and joins.
// The first exception thrown by any worker is rethrown.
template <typename Fn>
void run_workers(std::size_t count, Fn&& fn) {
  if (count <= 1) {
    fn(std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> threads;
    threads.reserve(count - 1);
    for (std::size_t w = 1; w < count; ++w)
      threads.emplace_back([&, w] {
        try {
          fn(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    try {
      fn(std::size_t{0});
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Bytes of physical memory currently available, or 0 if unknown.
std::size_t available_memory_bytes();

}  // namespace l3f::detail
