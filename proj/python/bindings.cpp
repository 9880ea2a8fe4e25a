// Python bindings: numpy arrays in and out, plain dicts for reports.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <sstream>

#include "l3fuse/bench.hpp"
#include "l3fuse/engines.hpp"
#include "l3fuse/errors.hpp"
#include "l3fuse/report.hpp"
#include "l3fuse/roofline.hpp"
#include "l3fuse/shared_buffer.hpp"
#include "l3fuse/winograd.hpp"

namespace py = pybind11;
using namespace l3f;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Tensor4D to_tensor(const FloatArray& array, const char* what) {
  if (array.ndim() != 4)
    throw ShapeMismatch(std::string(what) + " must be a 4-D array");
  Dims4 dims{};
  for (int i = 0; i < 4; ++i) dims[i] = static_cast<std::size_t>(array.shape(i));
  Tensor4D t(dims);
  std::copy_n(array.data(), t.size(), t.data());
  return t;
}

py::array_t<float> to_array(const Tensor4D& t) {
  const Dims4 d = t.dims();
  py::array_t<float> out({d[0], d[1], d[2], d[3]});
  std::copy_n(t.data(), t.size(), out.mutable_data());
  return out;
}

py::dict stats_dict(const ConvStats& s) {
  py::dict d;
  d["wall_seconds"] = s.wall_seconds;
  d["phase_seconds"] = s.phase_seconds;
  d["flops"] = s.flops;
  d["tiles"] = s.tiles;
  d["tasks"] = s.tasks;
  d["workers"] = s.workers;
  d["intermediate_bytes"] = s.intermediate_bytes;
  d["overwrite_violations"] = s.overwrite_violations;
  d["warnings"] = s.warnings;
  return d;
}

py::array_t<double> matrix_array(const RationalMatrix& m) {
  py::array_t<double> out({m.rows, m.cols});
  const auto values = m.to_double();
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<std::string> matrix_strings(const RationalMatrix& m) {
  std::vector<std::string> out;
  for (const auto& v : m.values) {
    std::ostringstream os;
    os << v;
    out.push_back(os.str());
  }
  return out;
}

py::dict plan_dict(const PlanReport& r) {
  py::dict d;
  d["tile"] = r.tile;
  d["alpha"] = r.alpha;
  d["l3_fits"] = r.l3.fits;
  d["l3_required_bytes"] = r.l3.required_bytes;
  d["r_lower"] = r.r_lower;
  d["r_upper"] = r.r_upper;
  d["chosen_r"] = r.chosen_r;
  d["r_feasible"] = r.r_feasible;
  d["utilization_l3"] = r.utilization_l3;
  d["utilization_mem"] = r.utilization_mem;
  d["utilization"] = r.utilization;
  d["feasible"] = r.feasible();
  return d;
}

std::optional<std::vector<Rational>> points_from(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  return parse_points(*text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fused Winograd convolution engines, transforms and cache planning";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InvalidDimension>(m, "InvalidDimension", base.ptr());
  py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", base.ptr());
  py::register_exception<AllocationError>(m, "AllocationError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<LayerSpec>(m, "LayerSpec")
      .def(py::init([](std::size_t batch, std::size_t in_channels, std::size_t out_channels,
                       std::size_t height, std::size_t width, std::size_t kernel,
                       std::size_t pad_lo, std::optional<std::size_t> pad_hi) {
             LayerSpec s;
             s.batch = batch;
             s.in_channels = in_channels;
             s.out_channels = out_channels;
             s.in_height = height;
             s.in_width = width;
             s.kernel = kernel;
             s.pad_lo = pad_lo;
             s.pad_hi = pad_hi.value_or(pad_lo);
             s.validate();
             return s;
           }),
           py::arg("batch"), py::arg("in_channels"), py::arg("out_channels"),
           py::arg("height"), py::arg("width"), py::arg("kernel") = 3, py::arg("pad_lo") = 1,
           py::arg("pad_hi") = py::none())
      .def_readonly("batch", &LayerSpec::batch)
      .def_readonly("in_channels", &LayerSpec::in_channels)
      .def_readonly("out_channels", &LayerSpec::out_channels)
      .def_readonly("height", &LayerSpec::in_height)
      .def_readonly("width", &LayerSpec::in_width)
      .def_readonly("kernel", &LayerSpec::kernel)
      .def_readonly("pad_lo", &LayerSpec::pad_lo)
      .def_readonly("pad_hi", &LayerSpec::pad_hi)
      .def_property_readonly("out_height", &LayerSpec::out_height)
      .def_property_readonly("out_width", &LayerSpec::out_width)
      .def("__eq__", &LayerSpec::operator==)
      .def("__repr__", &LayerSpec::to_string);

  m.def(
      "conv2d",
      [](const FloatArray& input, const FloatArray& kernels, std::size_t pad_lo,
         std::optional<std::size_t> pad_hi, const std::string& engine, int tile,
         std::size_t tiles_per_task, std::size_t workers, bool instrumented,
         std::optional<std::string> points) {
        const Tensor4D x = to_tensor(input, "input");
        const Tensor4D w = to_tensor(kernels, "kernels");
        LayerSpec s;
        s.batch = x.dim(0);
        s.in_channels = x.dim(1);
        s.in_height = x.dim(2);
        s.in_width = x.dim(3);
        s.out_channels = w.dim(0);
        s.kernel = w.dim(2);
        s.pad_lo = pad_lo;
        s.pad_hi = pad_hi.value_or(pad_lo);
        EngineConfig config;
        config.kind = parse_engine(engine);
        config.tile = tile;
        config.tiles_per_task = tiles_per_task;
        config.workers = workers;
        config.instrumented = instrumented;
        config.points = points_from(points);
        ConvResult result;
        {
          py::gil_scoped_release release;
          result = convolve(x, w, s, config);
        }
        return py::make_tuple(to_array(result.output), stats_dict(result.stats));
      },
      py::arg("input"), py::arg("kernels"), py::arg("pad_lo") = 1,
      py::arg("pad_hi") = py::none(), py::arg("engine") = "fused", py::arg("tile") = 7,
      py::arg("tiles_per_task") = 24, py::arg("workers") = 1,
      py::arg("instrumented") = false, py::arg("points") = py::none(),
      "Cross-correlate NCHW input with OIHW kernels; returns (output, stats).");

  m.def(
      "make_basis",
      [](int tile, int kernel, std::optional<std::string> points) {
        const WinogradBasis b = points ? make_basis(tile, kernel, parse_points(*points))
                                       : make_basis(tile, kernel);
        py::dict d;
        d["tile"] = b.tile();
        d["kernel"] = b.kernel();
        d["out_tile"] = b.out_tile();
        d["A"] = matrix_array(b.exact_a());
        d["B"] = matrix_array(b.exact_b());
        d["G"] = matrix_array(b.exact_g());
        d["exact"] = py::dict(py::arg("A") = matrix_strings(b.exact_a()),
                              py::arg("B") = matrix_strings(b.exact_b()),
                              py::arg("G") = matrix_strings(b.exact_g()));
        return d;
      },
      py::arg("tile"), py::arg("kernel") = 3, py::arg("points") = py::none(),
      "Transform matrices for out = A^T [(G w G^T) * (B x B^T)] A.");

  m.def(
      "buffer_layout",
      [](std::size_t tiles_per_task, std::size_t in_channels, std::size_t out_channels,
         std::size_t tile) {
        const BufferLayout l = buffer_layout(tiles_per_task, in_channels, out_channels, tile);
        py::dict d;
        d["capacity"] = l.capacity;
        d["left_bytes"] = l.left_bytes;
        d["result_bytes"] = l.result_bytes;
        d["separate_bytes"] = l.separate_bytes();
        d["left_offsets"] = l.left_offsets();
        d["result_offsets"] = l.result_offsets();
        return d;
      },
      py::arg("tiles_per_task"), py::arg("in_channels"), py::arg("out_channels"),
      py::arg("tile"));

  m.def(
      "plan",
      [](const std::filesystem::path& machine, const LayerSpec& layer, int tile, double alpha,
         double l2_fraction, double l3_fraction) {
        PlanOptions options{alpha, l2_fraction, l3_fraction};
        return plan_dict(plan_layer(layer, tile, load_machine_model(machine), options));
      },
      py::arg("machine"), py::arg("layer"), py::arg("tile") = 7, py::arg("alpha") = 1.0,
      py::arg("l2_fraction") = 0.5, py::arg("l3_fraction") = 0.5,
      "Roofline plan for a layer on a machine model JSON file.");

  m.def("r_lower_bound", &r_lower_bound, py::arg("cmr_l3"), py::arg("alpha") = 1.0);
  m.def("r_upper_bound", &r_upper_bound, py::arg("in_channels"), py::arg("out_channels"),
        py::arg("tile"), py::arg("l2_bytes"), py::arg("fraction") = 0.5);
  m.def("l2_element_budget", &l2_element_budget, py::arg("l2_bytes"),
        py::arg("fraction") = 0.5);

  m.def(
      "verify_case",
      [](const LayerSpec& spec, int tile, std::size_t tiles_per_task, std::size_t workers,
         std::uint64_t seed, double tolerance) {
        VerifyCase v;
        {
          py::gil_scoped_release release;
          v = verify_case(spec, tile, tiles_per_task, workers, seed, tolerance);
        }
        py::dict d;
        d["fused_vs_direct"] = v.fused_vs_direct;
        d["three_stage_vs_direct"] = v.three_stage_vs_direct;
        d["fused_equals_three_stage"] = v.fused_equals_three_stage;
        d["overwrite_violations"] = v.overwrite_violations;
        d["pass"] = v.pass;
        return d;
      },
      py::arg("spec"), py::arg("tile") = 7, py::arg("tiles_per_task") = 24,
      py::arg("workers") = 1, py::arg("seed") = 1, py::arg("tolerance") = 1e-4);

  m.def(
      "bench",
      [](const std::string& suite, std::vector<std::string> engines, int tile,
         std::size_t tiles_per_task, std::size_t workers, std::size_t repetitions,
         std::size_t warmup, std::optional<std::size_t> batch, bool verify,
         const std::string& format) {
        BenchOptions o;
        o.engines.clear();
        for (const auto& e : engines) o.engines.push_back(parse_engine(e));
        o.config.tile = tile;
        o.config.tiles_per_task = tiles_per_task;
        o.config.workers = workers;
        o.repetitions = repetitions;
        o.warmup = warmup;
        o.batch = batch;
        o.verify = verify;
        const ReportFormat fmt = parse_report_format(format);
        std::vector<BenchResult> results;
        {
          py::gil_scoped_release release;
          results = run_suite(builtin_suite(suite), o);
        }
        return render_report(results, fmt);
      },
      py::arg("suite") = "resnet",
      py::arg("engines") = std::vector<std::string>{"three_stage", "fused"},
      py::arg("tile") = 7, py::arg("tiles_per_task") = 24, py::arg("workers") = 0,
      py::arg("repetitions") = 10, py::arg("warmup") = 3, py::arg("batch") = py::none(),
      py::arg("verify") = false, py::arg("format") = "json",
      "Run a builtin layer suite and return the rendered report.");
}
