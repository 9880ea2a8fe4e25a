#include "l3fuse/roofline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "l3fuse/errors.hpp"

namespace l3f {

void MachineModel::validate() const {
  if (!(peak_flops > 0.0) || !(mem_bandwidth > 0.0) || !(l3_bandwidth > 0.0) ||
      l2_bytes == 0 || l3_bytes == 0 || cores == 0)
    throw InvalidParameter("machine model '" + name + "' has non-positive fields");
}

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end())
    throw ParseError(std::string("machine model is missing field '") + field + "'",
                     field);
  return *it;
}

double positive_number(const nlohmann::json& doc, const char* field) {
  const nlohmann::json& value = require(doc, field);
  if (!value.is_number() || !(value.get<double>() > 0.0))
    throw ParseError(std::string("machine model field '") + field +
                         "' must be a positive number",
                     field);
  return value.get<double>();
}

std::size_t positive_integer(const nlohmann::json& doc, const char* field) {
  const nlohmann::json& value = require(doc, field);
  if (!value.is_number() || !(value.get<double>() >= 1.0))
    throw ParseError(std::string("machine model field '") + field +
                         "' must be a positive integer",
                     field);
  return static_cast<std::size_t>(value.get<double>());
}

}  // namespace

MachineModel parse_machine_model(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("machine model is not valid JSON: ") + e.what(), "");
  }
  if (!doc.is_object()) throw ParseError("machine model must be a JSON object", "");

  MachineModel model;
  const nlohmann::json& name = require(doc, "name");
  if (!name.is_string())
    throw ParseError("machine model field 'name' must be a string", "name");
  model.name = name.get<std::string>();
  model.peak_flops = positive_number(doc, "peak_flops");
  model.mem_bandwidth = positive_number(doc, "mem_bandwidth_bytes_per_s");
  model.l3_bandwidth = positive_number(doc, "l3_bandwidth_bytes_per_s");
  model.l2_bytes = positive_integer(doc, "l2_bytes_per_core");
  model.l3_bytes = positive_integer(doc, "l3_bytes");
  model.cores = positive_integer(doc, "cores");
  return model;
}

MachineModel load_machine_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read machine model " + path.string(), "");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_machine_model(text.str());
}

std::string machine_model_to_json(const MachineModel& model) {
  nlohmann::json doc{{"name", model.name},
                     {"peak_flops", model.peak_flops},
                     {"mem_bandwidth_bytes_per_s", model.mem_bandwidth},
                     {"l3_bandwidth_bytes_per_s", model.l3_bandwidth},
                     {"l2_bytes_per_core", model.l2_bytes},
                     {"l3_bytes", model.l3_bytes},
                     {"cores", model.cores}};
  return doc.dump(2);
}

L3Fit l3_fit(std::size_t in_channels, std::size_t out_channels, std::size_t tile,
             std::size_t l3_bytes, double occupancy_fraction) {
  if (!(occupancy_fraction > 0.0) || occupancy_fraction > 1.0)
    throw InvalidParameter("L3 occupancy fraction must lie in (0, 1]");
  L3Fit fit;
  fit.required_bytes = 4ull * in_channels * out_channels * tile * tile;
  fit.fits = static_cast<double>(fit.required_bytes) <=
             occupancy_fraction * static_cast<double>(l3_bytes);
  return fit;
}

double ai_l3(std::size_t tiles_per_task, double alpha) {
  return alpha * static_cast<double>(tiles_per_task) / 2.0;
}

std::size_t r_lower_bound(double cmr_l3, double alpha) {
  const double exact = 2.0 * cmr_l3 / alpha;
  // Absorb representation noise so that a CMR of exactly 10 gives 20.
  return static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-9)));
}

double ai_mem(std::size_t in_channels, std::size_t out_channels) {
  const auto c = static_cast<double>(in_channels);
  const auto cp = static_cast<double>(out_channels);
  return c * cp / (2.0 * (c + cp));
}

double ai_mem_lower_bound(std::size_t in_channels, std::size_t out_channels) {
  return static_cast<double>(std::min(in_channels, out_channels)) / 4.0;
}

std::size_t l2_element_budget(std::size_t l2_bytes, double fraction) {
  return static_cast<std::size_t>(fraction * static_cast<double>(l2_bytes) / 4.0);
}

std::size_t r_upper_bound(std::size_t in_channels, std::size_t out_channels,
                          std::size_t tile, std::size_t l2_bytes, double fraction) {
  const std::size_t per_tile = std::max(in_channels, out_channels) * (tile * tile + 1);
  return l2_element_budget(l2_bytes, fraction) / per_tile;
}

PlanReport plan_layer(const LayerSpec& layer, int tile, const MachineModel& machine,
                      const PlanOptions& options) {
  machine.validate();
  if (tile < 1) throw InvalidParameter("tile size must be positive");
  if (!(options.alpha > 0.0)) throw InvalidParameter("alpha must be positive");
  const auto t = static_cast<std::size_t>(tile);

  PlanReport report;
  report.layer = layer;
  report.tile = tile;
  report.alpha = options.alpha;
  report.l3 = l3_fit(layer.in_channels, layer.out_channels, t, machine.l3_bytes,
                     options.l3_fraction);
  report.r_lower = r_lower_bound(machine.cmr_l3(), options.alpha);
  report.r_upper = r_upper_bound(layer.in_channels, layer.out_channels, t,
                                 machine.l2_bytes, options.l2_fraction);
  report.chosen_r = report.r_upper;
  report.r_feasible = report.r_upper >= 1 && report.r_lower <= report.r_upper;

  report.utilization_l3 =
      std::min(1.0, ai_l3(report.chosen_r, options.alpha) / machine.cmr_l3());
  report.utilization_mem = std::min(
      1.0, options.alpha * ai_mem(layer.in_channels, layer.out_channels) /
               machine.cmr_mem());
  report.utilization = std::min(report.utilization_l3, report.utilization_mem);
  return report;
}

std::string format_plan(const PlanReport& r, const MachineModel& machine) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "machine          " << machine.name << " (CMR L3 " << machine.cmr_l3()
     << ", CMR mem " << machine.cmr_mem() << ")\n";
  os << "layer            C=" << r.layer.in_channels << " C'=" << r.layer.out_channels
     << " T=" << r.tile << " alpha=" << r.alpha << "\n";
  os << "l3_fit           " << (r.l3.fits ? "yes" : "no") << " (" << r.l3.required_bytes
     << " bytes of right-hand matrices)\n";
  os << "r_lower          " << r.r_lower << "\n";
  os << "r_upper          " << r.r_upper << "\n";
  os << "chosen_r         " << r.chosen_r << "\n";
  os << "utilization_l3   " << r.utilization_l3 << "\n";
  os << "utilization_mem  " << r.utilization_mem << "\n";
  os << "utilization      " << r.utilization << "\n";
  os << "feasible         " << (r.feasible() ? "yes" : "no");
  if (!r.r_feasible) os << " (r_lower " << r.r_lower << " > r_upper " << r.r_upper << ")";
  if (!r.l3.fits) os << " (right-hand matrices exceed the L3 share)";
  os << "\n";
  return os.str();
}

}  // namespace l3f
