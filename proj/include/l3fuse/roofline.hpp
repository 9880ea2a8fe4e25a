#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "l3fuse/layer.hpp"

namespace l3f {

// Machine description used by the planner. Values are inputs (the L3
// bandwidth in particular has to be measured), never probed.
struct MachineModel {
  std::string name;
  double peak_flops = 0.0;     // FLOP/s
  double mem_bandwidth = 0.0;  // bytes/s
  double l3_bandwidth = 0.0;   // bytes/s
  std::size_t l2_bytes = 0;    // per core
  std::size_t l3_bytes = 0;    // total, shared
  std::size_t cores = 0;

  double cmr_mem() const noexcept { return peak_flops / mem_bandwidth; }
  double cmr_l3() const noexcept { return peak_flops / l3_bandwidth; }

  // Throws InvalidParameter if any quantity is not positive.
  void validate() const;
};

// JSON object with the fields name, peak_flops, mem_bandwidth_bytes_per_s,
// l3_bandwidth_bytes_per_s, l2_bytes_per_core, l3_bytes and cores. Throws
// ParseError naming the missing or malformed field.
MachineModel parse_machine_model(std::string_view json_text);
MachineModel load_machine_model(const std::filesystem::path& path);
std::string machine_model_to_json(const MachineModel& model);

struct L3Fit {
  bool fits = false;
  std::uint64_t required_bytes = 0;  // 4 * C * C' * T^2
};

// Right-hand matrices against a fraction of the shared cache.
L3Fit l3_fit(std::size_t in_channels, std::size_t out_channels, std::size_t tile,
             std::size_t l3_bytes, double occupancy_fraction = 0.5);

// FLOPs per byte of right-hand matrices streamed from L3 per task:
// alpha * 2RCC'T^2 / 4CC'T^2 = alpha * R / 2.
double ai_l3(std::size_t tiles_per_task, double alpha = 1.0);

// Smallest R with ai_l3(R) >= cmr_l3, i.e. ceil(2 * cmr_l3 / alpha).
std::size_t r_lower_bound(double cmr_l3, double alpha = 1.0);

// FLOPs per byte of input/output tiles moved to main memory:
// 2RCC'T^2 / 4RT^2(C + C') = CC' / (2(C + C')).
double ai_mem(std::size_t in_channels, std::size_t out_channels);
// The min(C, C') / 4 lower bound on ai_mem.
double ai_mem_lower_bound(std::size_t in_channels, std::size_t out_channels);

// Floats that fit in `fraction` of the L2 cache.
std::size_t l2_element_budget(std::size_t l2_bytes, double fraction = 0.5);

// Largest R with R * max(C, C') * (T^2 + 1) <= l2_element_budget; 0 if none.
std::size_t r_upper_bound(std::size_t in_channels, std::size_t out_channels,
                          std::size_t tile, std::size_t l2_bytes,
                          double fraction = 0.5);

struct PlanOptions {
  double alpha = 1.0;  // 1 for Winograd, 2 for FFT
  double l2_fraction = 0.5;
  double l3_fraction = 0.5;
};

struct PlanReport {
  LayerSpec layer;
  int tile = 0;
  double alpha = 1.0;
  L3Fit l3;
  std::size_t r_lower = 0;
  std::size_t r_upper = 0;
  std::size_t chosen_r = 0;
  bool r_feasible = false;  // r_lower <= r_upper
  double utilization_l3 = 0.0;
  double utilization_mem = 0.0;
  double utilization = 0.0;  // min over levels

  bool feasible() const noexcept { return l3.fits && r_feasible; }
};

// Picks the largest R admitted by the L2 bound and predicts utilization as
// min over {L3, memory} of min(1, AI / CMR) at that R.
PlanReport plan_layer(const LayerSpec& layer, int tile, const MachineModel& machine,
                      const PlanOptions& options = {});

std::string format_plan(const PlanReport& report, const MachineModel& machine);

}  // namespace l3f
