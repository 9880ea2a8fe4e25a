// Acceptance suite: one PASS/FAIL line per criterion. Exit status is zero
// when every gated criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "l3fuse/bench.hpp"
#include "l3fuse/engines.hpp"
#include "l3fuse/roofline.hpp"
#include "l3fuse/shared_buffer.hpp"
#include "l3fuse/tile_plan.hpp"
#include "l3fuse/transform.hpp"
#include "l3fuse/winograd.hpp"
#include "oracles.hpp"

using namespace l3f;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int gated_failures = 0;

void report(const char* name, bool gated, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%s  %-28s %s%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name,
              gated ? "" : "[soft, not gated] ", o.detail.c_str(), secs);
  std::fflush(stdout);
  if (gated && !o.pass) ++gated_failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LayerSpec resnet64(std::size_t batch) {
  LayerSpec s = builtin_suite("resnet").front().spec;
  s.batch = batch;
  return s;
}

Dims4 input_dims(const LayerSpec& s) { return {s.batch, s.in_channels, s.in_height, s.in_width}; }
Dims4 kernel_dims(const LayerSpec& s) { return {s.out_channels, s.in_channels, s.kernel, s.kernel}; }

bool same_bits(const Tensor4D& a, const Tensor4D& b) {
  return a.dims() == b.dims() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

Outcome correctness() {
  constexpr int kTiles[] = {4, 6, 7, 8};
  constexpr std::size_t kCases = 60;
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<std::size_t> r_dist(1, 48);
  const auto start = Clock::now();
  std::size_t passed = 0, bit_equal = 0, violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < kCases; ++i) {
    const LayerSpec spec = random_layer(rng);
    const VerifyCase v = verify_case(spec, kTiles[i % 4], r_dist(rng), 4, 1000 + i, 1e-4);
    passed += v.pass;
    bit_equal += v.fused_equals_three_stage;
    violations += v.overwrite_violations;
    worst = std::max(worst, v.fused_vs_direct);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  return {passed == kCases && secs < 300.0,
          fmt("%zu/%zu specs within 1e-4 (worst %.2e), %zu bit-equal to 3-stage, "
              "%zu overwrite violations, %.1fs < 300s",
              passed, kCases, worst, bit_equal, violations, secs)};
}

Outcome winograd_identity() {
  std::size_t cases = 0, failures = 0;
  for (int t = kMinTile; t <= kMaxTile; ++t) {
    const WinogradBasis basis = make_basis(t, 3);
    const auto n = static_cast<std::size_t>(t);
    const auto& A = basis.exact_a().values;
    const auto& B = basis.exact_b().values;
    const auto& G = basis.exact_g().values;
    for (std::size_t xi = 0; xi < n * n; ++xi)
      for (std::size_t wi = 0; wi < 9; ++wi) {
        std::vector<Rational> x(n * n), w(9);
        x[xi] = 1;
        w[wi] = 1;
        ++cases;
        if (oracle::winograd_tile(A, B, G, n, 3, x, w) != oracle::correlate_valid(x, n, w, 3))
          ++failures;
      }
  }
  return {failures == 0, fmt("%zu exact rational cases over T=4..8, %zu mismatches", cases, failures)};
}

Outcome shared_buffer() {
  std::size_t layouts = 0, bad = 0;
  for (std::size_t t = 4; t <= 8; ++t)
    for (std::size_t c = 8; c <= 512; c += 8)
      for (std::size_t cp = 8; cp <= 512; cp += 8)
        for (std::size_t r = 1; r <= 64; ++r) {
          const BufferLayout l = buffer_layout(r, c, cp, t);
          const std::size_t sl = 4 * r * c, sr = 4 * r * cp, p = t * t;
          bool ok = l.capacity == p * std::max(sl, sr) + std::min(sl, sr);
          for (std::size_t i = 1; ok && i <= p; ++i)
            ok = l.result_offset(i) + sr <= l.left_offset(i) &&
                 l.left_offset(i) + sl <= l.capacity;
          ++layouts;
          bad += !ok;
        }

  const BufferLayout a = buffer_layout_bytes(4, 32, 32);
  const BufferLayout b = buffer_layout_bytes(4, 24, 40);
  const bool examples_ok = a.capacity == 160 && a.capacity / 4 == 40 && b.capacity == 184 &&
                      b.capacity / 4 == 46;

  // Instrumented fused runs with skewed channel ratios and partial tasks.
  std::size_t violations = 0;
  const std::size_t shapes[][2] = {{1, 128}, {128, 1}, {3, 77}, {64, 64}, {96, 17}};
  for (const auto& sh : shapes)
    for (int t : {4, 8}) {
      LayerSpec s;
      s.batch = 2;
      s.in_channels = sh[0];
      s.out_channels = sh[1];
      s.in_height = 23;
      s.in_width = 29;
      s.pad_lo = s.pad_hi = 1;
      EngineConfig config;
      config.tile = t;
      config.tiles_per_task = 7;
      config.workers = 3;
      config.instrumented = true;
      const ConvResult r = convolve(Tensor4D::random(input_dims(s), 5),
                                    Tensor4D::random(kernel_dims(s), 6), s, config);
      violations += r.stats.overwrite_violations;
    }
  return {bad == 0 && examples_ok && violations == 0,
          fmt("%zu layouts, %zu bad; example buffers %zu B/%zu slots and %zu B/%zu slots; "
              "%zu tracked violations",
              layouts, bad, a.capacity, a.capacity / 4, b.capacity, b.capacity / 4, violations)};
}

Outcome roofline() {
  constexpr std::size_t kMiB = 1024 * 1024;
  const std::size_t lo10 = r_lower_bound(10.0), lo4 = r_lower_bound(4.0);
  const std::size_t b256 = l2_element_budget(256 * 1024), b1m = l2_element_budget(kMiB);
  const auto f1 = l3_fit(32, 32, 16, 8 * kMiB).required_bytes;
  const auto f2 = l3_fit(64, 64, 16, 8 * kMiB).required_bytes;
  const auto f3 = l3_fit(128, 128, 8, 8 * kMiB).required_bytes;
  const bool ok = lo10 == 20 && lo4 == 8 && b256 == 32768 && b1m == 131072 &&
                  f1 == kMiB && f2 == 4 * kMiB && f3 == 4 * kMiB;
  return {ok, fmt("r_lower %zu/%zu, L2 budgets %zu/%zu, L3 fit %llu/%llu/%llu bytes", lo10, lo4,
                  b256, b1m, (unsigned long long)f1, (unsigned long long)f2,
                  (unsigned long long)f3)};
}

Outcome determinism() {
  const LayerSpec s = resnet64(8);
  const Tensor4D input = Tensor4D::random(input_dims(s), 11);
  const Tensor4D kernels = Tensor4D::random(kernel_dims(s), 12);
  EngineConfig config;
  const KernelPack pack = transform_kernels(kernels, basis_for(config, 3));
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::size_t> counts{1, 2, 4, hw};
  std::sort(counts.begin(), counts.end());
  counts.erase(std::unique(counts.begin(), counts.end()), counts.end());

  config.workers = 1;
  const Tensor4D reference = conv_fused(input, pack, s, config).output;
  std::size_t runs = 0, mismatches = 0;
  for (std::size_t w : counts) {
    config.workers = w;
    ++runs;
    mismatches += !same_bits(conv_fused(input, pack, s, config).output, reference);
  }
  config.workers = std::min<std::size_t>(4, std::max<std::size_t>(2, hw));
  for (int i = 0; i < 10; ++i) {
    ++runs;
    mismatches += !same_bits(conv_fused(input, pack, s, config).output, reference);
  }
  std::string list;
  for (std::size_t w : counts) list += (list.empty() ? "" : ",") + std::to_string(w);
  return {mismatches == 0,
          fmt("%zu runs (workers {%s} plus 10 repeats), %zu differ bitwise", runs,
              list.c_str(), mismatches)};
}

Outcome footprint() {
  const LayerSpec s = resnet64(64);
  const Tensor4D input = Tensor4D::random(input_dims(s), 21);
  const Tensor4D kernels = Tensor4D::random(kernel_dims(s), 22);
  EngineConfig config;
  config.tile = 7;
  config.tiles_per_task = 24;
  config.workers = 4;
  const KernelPack pack = transform_kernels(kernels, basis_for(config, 3));
  const ConvResult staged = conv_three_stage(input, pack, s, config);
  const ConvResult fused = conv_fused(input, pack, s, config);
  const std::size_t expected = 4 * buffer_layout(24, 64, 64, 7).capacity;
  const bool ok = staged.stats.intermediate_bytes >= 200'000'000 &&
                  fused.stats.intermediate_bytes == expected;
  return {ok, fmt("3-stage %.1f MB, fused %zu bytes = 4 workers x %zu (%.2f MB)",
                  staged.stats.intermediate_bytes / 1e6, fused.stats.intermediate_bytes,
                  expected / 4, fused.stats.intermediate_bytes / 1e6)};
}

Outcome flop_accounting() {
  std::size_t checked = 0, bad = 0;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> r_dist(1, 40);
  for (int i = 0; i < 8; ++i) {
    const LayerSpec s = random_layer(rng);
    EngineConfig config;
    config.tile = 4 + i % 5;
    config.tiles_per_task = r_dist(rng);
    config.workers = 2;
    config.instrumented = true;
    const ConvResult r = convolve(Tensor4D::random(input_dims(s), i),
                                  Tensor4D::random(kernel_dims(s), i + 1), s, config);
    const TilePlan plan(s, config.tile);
    const std::uint64_t per_tile =
        2ull * s.in_channels * s.out_channels * config.tile * config.tile;
    std::uint64_t sum = 0;
    std::size_t tasks = 0;
    for (std::size_t first = 0; first < plan.n_tile(); first += config.tiles_per_task, ++tasks)
      sum += per_tile * std::min(config.tiles_per_task, plan.n_tile() - first);
    ++checked;
    bad += r.stats.flops != sum || sum != per_tile * plan.n_tile() || r.stats.tasks != tasks;
  }
  return {bad == 0, fmt("%zu layers, %zu with FLOPs != sum over tasks of 2*R_eff*C*C'*T^2",
                        checked, bad)};
}

Outcome performance() {
  BenchOptions options;
  options.config.workers = 0;
  options.repetitions = 5;
  options.warmup = 2;
  const auto results = run_suite({builtin_suite("resnet").front()}, options);
  double staged = 0.0, fused = 0.0;
  for (const auto& r : results) {
    if (!r.error.empty()) return {false, r.label + ": " + r.error};
    (r.engine == EngineKind::fused ? fused : staged) = r.median_ms;
  }
  const double ratio = staged / fused;
  return {ratio >= 0.9,
          fmt("ResNet-64 B=64 fused/3-stage throughput %.2fx (3-stage %.1f ms, fused %.1f ms, "
              "%u hardware threads)",
              ratio, staged, fused, std::thread::hardware_concurrency())};
}

}  // namespace

int main() {
  report("correctness", true, correctness);
  report("winograd-identity", true, winograd_identity);
  report("shared-buffer", true, shared_buffer);
  report("roofline-regression", true, roofline);
  report("scheduling-determinism", true, determinism);
  report("memory-footprint", true, footprint);
  report("performance", false, performance);
  report("flop-accounting", true, flop_accounting);
  std::printf("%s: %d gated criteria failed\n", gated_failures ? "FAIL" : "PASS", gated_failures);
  return gated_failures == 0 ? 0 : 1;
}
