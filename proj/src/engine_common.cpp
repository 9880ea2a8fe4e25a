#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "engine_internal.hpp"
#include "l3fuse/engines.hpp"
#include "l3fuse/errors.hpp"
#include "workers.hpp"

namespace l3f {

std::string_view to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::direct: return "direct";
    case EngineKind::three_stage: return "three_stage";
    case EngineKind::fused: return "fused";
  }
  return "unknown";
}

EngineKind parse_engine(std::string_view name) {
  if (name == "direct") return EngineKind::direct;
  if (name == "three_stage" || name == "3stage" || name == "three-stage")
    return EngineKind::three_stage;
  if (name == "fused") return EngineKind::fused;
  throw InvalidParameter("unknown engine '" + std::string(name) + "'");
}

void EngineConfig::validate() const {
  if (kind == EngineKind::direct) return;
  if (tile < kMinTile || tile > kMaxTile)
    throw InvalidParameter("tile size " + std::to_string(tile) +
                           " outside the supported range 4..8");
  if (kind == EngineKind::fused && tiles_per_task == 0)
    throw InvalidParameter("fused engine needs at least one tile per task");
}

std::size_t EngineConfig::resolved_workers() const {
  if (workers != 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

WinogradBasis basis_for(const EngineConfig& config, int kernel) {
  if (config.points) return make_basis(config.tile, kernel, *config.points);
  return make_basis(config.tile, kernel);
}

ConvResult convolve(const Tensor4D& input, const Tensor4D& kernels,
                    const LayerSpec& spec, const EngineConfig& config) {
  switch (config.kind) {
    case EngineKind::direct: return conv_direct(input, kernels, spec);
    case EngineKind::three_stage:
      return conv_three_stage(input, kernels, spec, config);
    case EngineKind::fused: {
      config.validate();
      const KernelPack pack =
          transform_kernels(kernels, basis_for(config, static_cast<int>(spec.kernel)));
      return conv_fused(input, pack, spec, config);
    }
  }
  throw InvalidParameter("unknown engine kind");
}

namespace detail {

void check_shapes(const Tensor4D& input, const LayerSpec& spec) {
  spec.validate();
  const Dims4 expected{spec.batch, spec.in_channels, spec.in_height, spec.in_width};
  if (input.dims() != expected)
    throw ShapeMismatch("input tensor shape does not match layer " + spec.to_string());
}

void check_kernels(const Tensor4D& kernels, const LayerSpec& spec) {
  const Dims4 expected{spec.out_channels, spec.in_channels, spec.kernel, spec.kernel};
  if (kernels.dims() != expected)
    throw ShapeMismatch("kernel tensor shape does not match layer " + spec.to_string());
}

void check_pack(const KernelPack& pack, const LayerSpec& spec, int tile) {
  if (pack.tile() != tile || pack.in_channels() != spec.in_channels ||
      pack.out_channels() != spec.out_channels)
    throw ShapeMismatch("kernel pack (T=" + std::to_string(pack.tile()) + ", C=" +
                        std::to_string(pack.in_channels()) + ", C'=" +
                        std::to_string(pack.out_channels()) +
                        ") does not match layer " + spec.to_string() +
                        " with T=" + std::to_string(tile));
}

std::size_t available_memory_bytes() {
  std::ifstream meminfo("/proc/meminfo");
  std::string line;
  while (std::getline(meminfo, line)) {
    if (line.rfind("MemAvailable:", 0) != 0) continue;
    std::istringstream is(line.substr(13));
    std::size_t kib = 0;
    is >> kib;
    return kib * 1024;
  }
  return 0;
}

}  // namespace detail

}  // namespace l3f
