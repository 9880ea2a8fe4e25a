// Command-line front end: benchmark suites, roofline plans, random
// equivalence sweeps and basis dumps.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "l3fuse/bench.hpp"
#include "l3fuse/errors.hpp"
#include "l3fuse/report.hpp"
#include "l3fuse/roofline.hpp"
#include "l3fuse/winograd.hpp"

namespace {

using namespace l3f;

constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;

struct LayerArgs {
  std::size_t batch = 64;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t kernel = 3;
  std::size_t pad = 1;

  void add_to(CLI::App& app) {
    app.add_option("--b", batch, "Batch size")->capture_default_str();
    app.add_option("--c", in_channels, "Input channels");
    app.add_option("--cprime", out_channels, "Output channels (defaults to --c)");
    app.add_option("--d", height, "Input height");
    app.add_option("--w", width, "Input width (defaults to --d)");
    app.add_option("--k", kernel, "Kernel size")->capture_default_str();
    app.add_option("--pad", pad, "Zero padding on each side")->capture_default_str();
  }

  bool given() const { return in_channels != 0; }

  LayerSpec spec() const {
    LayerSpec s;
    s.batch = batch;
    s.in_channels = in_channels;
    s.out_channels = out_channels ? out_channels : in_channels;
    s.in_height = height;
    s.in_width = width ? width : height;
    s.kernel = kernel;
    s.pad_lo = s.pad_hi = pad;
    s.validate();
    return s;
  }
};

struct BenchArgs {
  std::string suite = "resnet";
  LayerArgs layer;
  std::vector<std::string> engines{"three_stage", "fused"};
  int tile = 7;
  std::size_t tiles_per_task = 24;
  std::size_t workers = 0;
  std::size_t repetitions = 10;
  std::size_t warmup = 3;
  bool verify = false;
  std::size_t verify_batch = 2;
  bool full_verify = false;
  std::optional<std::size_t> batch;
  std::string format = "table";
  std::optional<std::string> out;
  std::uint64_t seed = 1;
  std::optional<std::string> points;
};

int run_bench(const BenchArgs& a) {
  std::vector<SuiteEntry> suite;
  if (a.layer.given()) {
    const LayerSpec s = a.layer.spec();
    suite.push_back({"custom", s});
  } else {
    suite = builtin_suite(a.suite);
  }

  BenchOptions options;
  options.engines.clear();
  for (const auto& name : a.engines) options.engines.push_back(parse_engine(name));
  options.config.tile = a.tile;
  options.config.tiles_per_task = a.tiles_per_task;
  options.config.workers = a.workers;
  if (a.points) options.config.points = parse_points(*a.points);
  options.repetitions = a.repetitions;
  options.warmup = a.warmup;
  options.verify = a.verify || a.full_verify;
  options.verify_batch = a.verify_batch;
  options.full_verify = a.full_verify;
  options.batch = a.batch;
  options.seed = a.seed;
  options.config.validate();
  const ReportFormat format = parse_report_format(a.format);

  const auto results = run_suite(suite, options, [](const BenchResult& r) {
    std::cerr << "  " << r.label << " / " << to_string(r.engine) << ": "
              << (r.error.empty() ? std::to_string(r.median_ms) + " ms" : r.error) << "\n";
  });
  emit_report(results, format, a.out);

  bool ok = true;
  for (const auto& r : results)
    ok = ok && r.error.empty() && r.verify != VerifyStatus::fail;
  return ok ? 0 : kExitFailure;
}

struct PlanArgs {
  std::string machine;
  LayerArgs layer;
  int tile = 7;
  PlanOptions options;
};

int run_plan(const PlanArgs& a) {
  const MachineModel machine = load_machine_model(a.machine);
  const PlanReport report = plan_layer(a.layer.spec(), a.tile, machine, a.options);
  std::cout << format_plan(report, machine);
  return report.feasible() ? 0 : kExitInfeasible;
}

struct VerifyArgs {
  std::size_t count = 50;
  std::uint64_t seed = 2024;
  std::size_t workers = 0;
  double tolerance = 1e-4;
};

int run_verify(const VerifyArgs& a) {
  constexpr int kTiles[] = {4, 6, 7, 8};
  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<std::size_t> tiles_per_task(1, 48);
  std::size_t failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < a.count; ++i) {
    const LayerSpec spec = random_layer(rng);
    const int tile = kTiles[i % 4];
    const std::size_t r = tiles_per_task(rng);
    const VerifyCase v = verify_case(spec, tile, r, a.workers, a.seed + i, a.tolerance);
    std::printf("%-4s %3zu  %-48s T=%d R=%-2zu fused=%.2e staged=%.2e bitequal=%s\n",
                v.pass ? "ok" : "FAIL", i, spec.to_string().c_str(), tile, r,
                v.fused_vs_direct, v.three_stage_vs_direct,
                v.fused_equals_three_stage ? "yes" : "no");
    if (!v.pass) ++failures;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%zu/%zu cases passed in %.1f s\n", a.count - failures, a.count, secs);
  return failures == 0 ? 0 : kExitFailure;
}

struct DumpArgs {
  int tile = 4;
  int kernel = 3;
  std::optional<std::string> points;
};

int run_dump(const DumpArgs& a) {
  const WinogradBasis basis = a.points ? make_basis(a.tile, a.kernel, parse_points(*a.points))
                                       : make_basis(a.tile, a.kernel);
  std::cout << dump_basis(basis) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fused Winograd convolution benchmarks and planning"};
  app.require_subcommand(1);

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench", "Time convolution engines on a layer suite");
  b->add_option("--suite", bench.suite, "resnet, vgg or all")->capture_default_str();
  bench.layer.add_to(*b);
  b->add_option("--engines", bench.engines, "Engines: direct, three_stage, fused")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("-T,--tile", bench.tile, "Input tile size (4..8)")->capture_default_str();
  b->add_option("-R,--tiles-per-task", bench.tiles_per_task, "Tiles per fused task")
      ->capture_default_str();
  b->add_option("--workers", bench.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  b->add_option("--reps", bench.repetitions, "Timed repetitions")->capture_default_str();
  b->add_option("--warmup", bench.warmup, "Untimed warmup runs")->capture_default_str();
  b->add_flag("--verify", bench.verify, "Check each engine against the direct oracle");
  b->add_option("--verify-batch", bench.verify_batch, "Batch size used for verification")
      ->capture_default_str();
  b->add_flag("--full-verify", bench.full_verify, "Verify at the timed batch size");
  b->add_option("--batch", bench.batch, "Override the batch size of every layer");
  b->add_option("--format", bench.format, "table, csv or json")->capture_default_str();
  b->add_option("--out", bench.out, "Write the report to this file");
  b->add_option("--seed", bench.seed, "Data seed")->capture_default_str();
  b->add_option("--points", bench.points, "Interpolation points, e.g. 0,1,-1,1/2");

  PlanArgs plan;
  CLI::App* p = app.add_subcommand("plan", "Roofline plan for a layer on a machine model");
  p->add_option("--machine", plan.machine, "Machine model JSON file")->required();
  plan.layer.add_to(*p);
  p->get_option("--c")->required();
  p->get_option("--d")->required();
  p->add_option("-T,--tile", plan.tile, "Input tile size")->capture_default_str();
  p->add_option("--alpha", plan.options.alpha, "Transform reuse factor (1 Winograd, 2 FFT)")
      ->capture_default_str();
  p->add_option("--l2-fraction", plan.options.l2_fraction, "Usable share of L2")
      ->capture_default_str();
  p->add_option("--l3-fraction", plan.options.l3_fraction, "Usable share of L3")
      ->capture_default_str();

  VerifyArgs verify;
  CLI::App* v = app.add_subcommand("verify", "Random equivalence sweep over all engines");
  v->add_option("--count", verify.count, "Number of random layers")->capture_default_str();
  v->add_option("--seed", verify.seed, "Sweep seed")->capture_default_str();
  v->add_option("--workers", verify.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  v->add_option("--tolerance", verify.tolerance, "Max relative error")->capture_default_str();

  DumpArgs dump;
  CLI::App* d = app.add_subcommand("dump-basis", "Print transform matrices as JSON");
  d->add_option("-T,--tile", dump.tile, "Input tile size")->capture_default_str();
  d->add_option("-K,--kernel", dump.kernel, "Kernel size")->capture_default_str();
  d->add_option("--points", dump.points, "Interpolation points, e.g. 0,1,-1");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*b) return run_bench(bench);
    if (*p) return run_plan(plan);
    if (*v) return run_verify(verify);
    if (*d) return run_dump(dump);
  } catch (const l3f::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
