#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "l3fuse/engines.hpp"
#include "l3fuse/layer.hpp"

namespace l3f {

struct SuiteEntry {
  std::string label;
  LayerSpec spec;
};

// "resnet": 64ch/56, 128ch/28, 256ch/14, 512ch/7; "vgg": 64ch/224,
// 128ch/112, 256ch/56, 512ch/28; "all": both. B=64, K=3, pad 1 throughout.
std::vector<SuiteEntry> builtin_suite(std::string_view name);

enum class VerifyStatus { skipped, pass, fail, error };
std::string_view to_string(VerifyStatus status);

struct BenchOptions {
  std::vector<EngineKind> engines{EngineKind::three_stage, EngineKind::fused};
  EngineConfig config;  // T, R, workers shared by every entry
  std::size_t repetitions = 10;
  std::size_t warmup = 3;
  std::optional<std::size_t> batch;  // overrides every entry's batch
  bool verify = false;
  std::size_t verify_batch = 2;
  bool full_verify = false;  // verify at the timed batch instead
  double tolerance = 1e-4;
  std::uint64_t seed = 1;
};

struct BenchResult {
  std::string label;
  EngineKind engine = EngineKind::fused;
  LayerSpec spec;
  int tile = 0;
  std::size_t tiles_per_task = 0;
  std::size_t workers = 0;
  std::size_t executions = 0;
  double median_ms = 0.0;
  double min_ms = 0.0;
  ConvStats stats;  // from the last timed run
  VerifyStatus verify = VerifyStatus::skipped;
  double max_rel_err = 0.0;
  std::string error;  // set when the entry could not run
};

using ProgressFn = std::function<void(const BenchResult&)>;

// Times every (layer, engine) pair: `warmup` untimed runs followed by
// `repetitions` timed runs, reporting median and minimum. Verification uses
// separate oracle runs at `verify_batch` and never changes the timed runs.
// Per-entry failures are recorded and the suite continues.
std::vector<BenchResult> run_suite(const std::vector<SuiteEntry>& suite,
                                   const BenchOptions& options,
                                   const ProgressFn& progress = {});

// Random layer within the ranges used by the equivalence sweep.
LayerSpec random_layer(std::mt19937_64& rng);

struct VerifyCase {
  LayerSpec spec;
  int tile = 0;
  std::size_t tiles_per_task = 0;
  double fused_vs_direct = 0.0;
  double three_stage_vs_direct = 0.0;
  bool fused_equals_three_stage = false;
  std::size_t overwrite_violations = 0;
  bool pass = false;
};

// Runs the three engines on seeded data and compares them.
VerifyCase verify_case(const LayerSpec& spec, int tile, std::size_t tiles_per_task,
                       std::size_t workers, std::uint64_t seed,
                       double tolerance = 1e-4);

}  // namespace l3f
