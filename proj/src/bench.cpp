#include "l3fuse/bench.hpp"

#include <algorithm>
#include <cstring>
#include <map>

#include "l3fuse/errors.hpp"
#include "l3fuse/tensor.hpp"
#include "l3fuse/transform.hpp"

namespace l3f {

namespace {

LayerSpec conv3x3(std::size_t channels, std::size_t extent) {
  LayerSpec spec;
  spec.batch = 64;
  spec.in_channels = channels;
  spec.out_channels = channels;
  spec.in_height = extent;
  spec.in_width = extent;
  spec.kernel = 3;
  spec.pad_lo = 1;
  spec.pad_hi = 1;
  return spec;
}

std::vector<SuiteEntry> resnet_suite() {
  return {{"resnet-64", conv3x3(64, 56)},
          {"resnet-128", conv3x3(128, 28)},
          {"resnet-256", conv3x3(256, 14)},
          {"resnet-512", conv3x3(512, 7)}};
}

std::vector<SuiteEntry> vgg_suite() {
  return {{"vgg-64", conv3x3(64, 224)},
          {"vgg-128", conv3x3(128, 112)},
          {"vgg-256", conv3x3(256, 56)},
          {"vgg-512", conv3x3(512, 28)}};
}

Dims4 input_dims(const LayerSpec& s) {
  return {s.batch, s.in_channels, s.in_height, s.in_width};
}

Dims4 kernel_dims(const LayerSpec& s) {
  return {s.out_channels, s.in_channels, s.kernel, s.kernel};
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

// Runs one engine with the kernel transform done outside the timed call.
class EngineRunner {
 public:
  EngineRunner(const Tensor4D& kernels, const LayerSpec& spec, EngineConfig config)
      : kernels_(kernels), config_(std::move(config)) {
    if (config_.kind == EngineKind::direct) return;
    config_.validate();
    pack_ = transform_kernels(kernels,
                              basis_for(config_, static_cast<int>(spec.kernel)));
  }

  ConvResult run(const Tensor4D& input, const LayerSpec& spec) const {
    switch (config_.kind) {
      case EngineKind::direct: return conv_direct(input, kernels_, spec);
      case EngineKind::three_stage: return conv_three_stage(input, pack_, spec, config_);
      case EngineKind::fused: return conv_fused(input, pack_, spec, config_);
    }
    throw InvalidParameter("unknown engine kind");
  }

 private:
  const Tensor4D& kernels_;
  EngineConfig config_;
  KernelPack pack_;
};

}  // namespace

std::vector<SuiteEntry> builtin_suite(std::string_view name) {
  if (name == "resnet") return resnet_suite();
  if (name == "vgg") return vgg_suite();
  if (name == "all") {
    auto suite = resnet_suite();
    for (auto& entry : vgg_suite()) suite.push_back(std::move(entry));
    return suite;
  }
  throw InvalidParameter("unknown suite '" + std::string(name) +
                         "' (expected resnet, vgg or all)");
}

std::string_view to_string(VerifyStatus status) {
  switch (status) {
    case VerifyStatus::skipped: return "skipped";
    case VerifyStatus::pass: return "pass";
    case VerifyStatus::fail: return "fail";
    case VerifyStatus::error: return "error";
  }
  return "unknown";
}

std::vector<BenchResult> run_suite(const std::vector<SuiteEntry>& suite,
                                   const BenchOptions& options,
                                   const ProgressFn& progress) {
  if (options.engines.empty()) throw InvalidParameter("no engines selected");
  if (options.repetitions == 0) throw InvalidParameter("repetitions must be >= 1");
  {
    std::map<std::string, int> seen;
    for (const auto& entry : suite)
      if (seen[entry.label]++ > 0)
        throw InvalidParameter("duplicate suite label '" + entry.label + "'");
  }

  std::vector<BenchResult> results;
  for (std::size_t index = 0; index < suite.size(); ++index) {
    const SuiteEntry& entry = suite[index];
    LayerSpec spec = entry.spec;
    if (options.batch) spec.batch = *options.batch;
    LayerSpec verify_spec = spec;
    if (!options.full_verify) verify_spec.batch = options.verify_batch;

    const std::uint64_t seed = options.seed + 7919 * index;
    std::optional<Tensor4D> input;
    std::optional<Tensor4D> kernels;
    std::optional<Tensor4D> verify_input;
    std::optional<Tensor4D> reference;

    for (EngineKind engine : options.engines) {
      BenchResult result;
      result.label = entry.label;
      result.engine = engine;
      result.spec = spec;
      result.workers = options.config.resolved_workers();
      if (engine != EngineKind::direct) result.tile = options.config.tile;
      if (engine == EngineKind::fused) result.tiles_per_task = options.config.tiles_per_task;

      try {
        spec.validate();
        if (!kernels) kernels = Tensor4D::random(kernel_dims(spec), seed + 1);
        if (!input) input = Tensor4D::random(input_dims(spec), seed);

        EngineConfig config = options.config;
        config.kind = engine;
        const EngineRunner runner(*kernels, spec, config);

        for (std::size_t i = 0; i < options.warmup; ++i) runner.run(*input, spec);
        std::vector<double> times;
        for (std::size_t i = 0; i < options.repetitions; ++i) {
          ConvResult run = runner.run(*input, spec);
          times.push_back(run.stats.wall_seconds * 1e3);
          result.stats = std::move(run.stats);
        }
        result.executions = options.warmup + options.repetitions;
        result.median_ms = median(times);
        result.min_ms = *std::min_element(times.begin(), times.end());
        if (engine == EngineKind::fused) result.workers = result.stats.workers;

        if (options.verify) {
          if (!verify_input)
            verify_input = options.full_verify
                               ? *input
                               : Tensor4D::random(input_dims(verify_spec), seed + 2);
          if (!reference)
            reference = conv_direct(*verify_input, *kernels, verify_spec).output;
          const ConvResult check = runner.run(*verify_input, verify_spec);
          result.max_rel_err = max_relative_error(check.output.values(), reference->values());
          result.verify = result.max_rel_err <= options.tolerance ? VerifyStatus::pass
                                                                  : VerifyStatus::fail;
        }
      } catch (const Error& e) {
        result.error = e.what();
        result.verify = VerifyStatus::error;
      } catch (const std::bad_alloc&) {
        result.error = "out of memory";
        result.verify = VerifyStatus::error;
      }
      if (progress) progress(result);
      results.push_back(std::move(result));
    }
  }
  return results;
}

LayerSpec random_layer(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> channels(1, 128);
  std::uniform_int_distribution<std::size_t> extent(5, 64);
  std::uniform_int_distribution<std::size_t> pad(0, 1);
  std::uniform_int_distribution<std::size_t> batch(1, 2);
  LayerSpec spec;
  spec.batch = batch(rng);
  spec.in_channels = channels(rng);
  spec.out_channels = channels(rng);
  spec.in_height = extent(rng);
  spec.in_width = extent(rng);
  spec.kernel = 3;
  spec.pad_lo = pad(rng);
  spec.pad_hi = spec.pad_lo;
  return spec;
}

VerifyCase verify_case(const LayerSpec& spec, int tile, std::size_t tiles_per_task,
                       std::size_t workers, std::uint64_t seed, double tolerance) {
  const Tensor4D input = Tensor4D::random(input_dims(spec), seed);
  const Tensor4D kernels = Tensor4D::random(kernel_dims(spec), seed + 1);

  EngineConfig config;
  config.tile = tile;
  config.tiles_per_task = tiles_per_task;
  config.workers = workers;
  config.instrumented = true;
  const KernelPack pack =
      transform_kernels(kernels, basis_for(config, static_cast<int>(spec.kernel)));

  const ConvResult direct = conv_direct(input, kernels, spec);
  const ConvResult staged = conv_three_stage(input, pack, spec, config);
  const ConvResult fused = conv_fused(input, pack, spec, config);

  VerifyCase out;
  out.spec = spec;
  out.tile = tile;
  out.tiles_per_task = tiles_per_task;
  out.fused_vs_direct = max_relative_error(fused.output.values(), direct.output.values());
  out.three_stage_vs_direct =
      max_relative_error(staged.output.values(), direct.output.values());
  out.fused_equals_three_stage =
      std::memcmp(fused.output.data(), staged.output.data(),
                  sizeof(float) * fused.output.size()) == 0;
  out.overwrite_violations = fused.stats.overwrite_violations;
  out.pass = out.fused_vs_direct <= tolerance && out.three_stage_vs_direct <= tolerance &&
             out.fused_equals_three_stage && out.overwrite_violations == 0;
  return out;
}

}  // namespace l3f
