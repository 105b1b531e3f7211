// Command line frontend: compose / sweep / benchmark over the accountant
// library, with JSON or CSV reports and optional SVG charts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prvacc/accountants.hpp"
#include "prvacc/report.hpp"
#include "svg_chart.hpp"

using namespace prvacc;

namespace {

struct CommonOptions {
  std::string mechanism;
  double scale = 1.0;
  double sigma = 1.0;
  double sampling_prob = 1.0;
  std::string direction = "remove";
  double eps_err = 0.1;
  double delta_err = 1e-10;
  std::string algorithm = "two-stage";
  bool loose_constants = false;
  std::string format;
  std::string output;
  std::string plot;
  // expert truncation/mesh overrides
  std::optional<double> ov_h1, ov_h2, ov_l1, ov_l2;
  std::vector<double> ov_h, ov_l;
};

void AddCommonOptions(CLI::App* cmd, CommonOptions* opts) {
  cmd->add_option("--mechanism", opts->mechanism,
                  "mechanism: laplace | gaussian | subsampled-gaussian")
      ->required()
      ->check(CLI::IsMember({"laplace", "gaussian", "subsampled-gaussian"}));
  cmd->add_option("--scale", opts->scale, "laplace noise scale b");
  cmd->add_option("--sigma", opts->sigma, "gaussian noise sigma");
  cmd->add_option("--sampling-prob", opts->sampling_prob,
                  "subsampling probability gamma in (0, 1]");
  cmd->add_option("--direction", opts->direction,
                  "adjacency direction for the subsampled mechanism")
      ->check(CLI::IsMember({"remove", "add", "both"}));
  cmd->add_option("--eps-err", opts->eps_err, "additive error budget in eps");
  cmd->add_option("--delta-err", opts->delta_err, "additive error budget in delta");
  cmd->add_option("--algorithm", opts->algorithm,
                  "single | two-stage | recursive")
      ->check(CLI::IsMember({"single", "two-stage", "recursive"}));
  cmd->add_flag("--loose-constants", opts->loose_constants,
                "recursive mode: base-2 instead of base-8 stage constants "
                "(outside the proven error analysis; flagged in the output)");
  cmd->add_option("--format", opts->format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--output", opts->output, "write the report here instead of stdout");
  cmd->add_option("--plot", opts->plot, "write an SVG chart to this path");
  cmd->add_option("--override-h1", opts->ov_h1, "two-stage fine mesh override");
  cmd->add_option("--override-h2", opts->ov_h2, "two-stage coarse mesh override");
  cmd->add_option("--override-L1", opts->ov_l1, "two-stage fine truncation override");
  cmd->add_option("--override-L2", opts->ov_l2, "two-stage coarse truncation override");
  cmd->add_option("--override-h", opts->ov_h,
                  "mesh override: one value (single) or per-stage list (recursive)")
      ->delimiter(',');
  cmd->add_option("--override-L", opts->ov_l,
                  "truncation override: one value or per-stage list")
      ->delimiter(',');
}

// The specs to run: one, or both adjacency directions for --direction both.
std::vector<MechanismSpec> BuildSpecs(const CommonOptions& opts) {
  if (opts.mechanism == "laplace") return {LaplaceSpec{opts.scale}};
  if (opts.mechanism == "gaussian") return {GaussianSpec{opts.sigma}};
  if (opts.direction == "both") {
    return {SubsampledGaussianSpec{opts.sigma, opts.sampling_prob, Adjacency::kRemove},
            SubsampledGaussianSpec{opts.sigma, opts.sampling_prob, Adjacency::kAdd}};
  }
  return {SubsampledGaussianSpec{opts.sigma, opts.sampling_prob,
                                 AdjacencyFromString(opts.direction)}};
}

std::map<std::string, double> SpecParams(const CommonOptions& opts) {
  if (opts.mechanism == "laplace") return {{"scale", opts.scale}};
  if (opts.mechanism == "gaussian") return {{"sigma", opts.sigma}};
  return {{"sigma", opts.sigma}, {"sampling_prob", opts.sampling_prob}};
}

CompositionResult RunOne(const MechanismSpec& spec, std::int64_t k,
                         const CommonOptions& opts) {
  const ErrorBudget budget{opts.eps_err, opts.delta_err};
  const Algorithm algorithm = AlgorithmFromString(opts.algorithm);
  switch (algorithm) {
    case Algorithm::kSingleStage: {
      SingleStageOverrides ov;
      if (!opts.ov_h.empty()) ov.mesh = opts.ov_h.front();
      if (!opts.ov_l.empty()) ov.truncation = opts.ov_l.front();
      return ComposeSingleStage(spec, k, budget, &ov);
    }
    case Algorithm::kRecursive: {
      RecursiveOverrides ov{opts.ov_h, opts.ov_l};
      return ComposeRecursive(spec, k, budget, opts.loose_constants, &ov);
    }
    default: {
      TwoStageOverrides ov{opts.ov_h1, opts.ov_h2, opts.ov_l1, opts.ov_l2};
      return ComposeTwoStage(spec, k, budget, &ov);
    }
  }
}

void EmitReports(const std::vector<ComposeReport>& reports,
                 const CommonOptions& opts) {
  const std::string format = opts.format.empty() ? "json" : opts.format;
  std::ostringstream body;
  if (format == "json") {
    const nlohmann::json j =
        reports.size() == 1 ? nlohmann::json(reports.front()) : nlohmann::json(reports);
    body << j.dump(2) << '\n';
  } else {
    WriteComposeCsv(body, reports);
  }
  if (opts.output.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream file(opts.output);
    if (!file) throw std::runtime_error("cannot write output file: " + opts.output);
    file << body.str();
  }
}

void PlotReport(const ComposeReport& report, const std::string& path) {
  svg::Panel panel;
  panel.title = report.mechanism + " k=" + std::to_string(report.k) + " (" +
                report.algorithm + ")";
  panel.x_label = "eps";
  panel.y_label = "delta";
  panel.log_y = true;
  svg::Series lower{"lower", {}}, estimate{"estimate", {}}, upper{"upper", {}};
  for (const DeltaSandwich& p : report.points) {
    lower.points.emplace_back(p.eps, p.lower);
    estimate.points.emplace_back(p.eps, p.estimate);
    upper.points.emplace_back(p.eps, p.upper);
  }
  panel.series = {lower, estimate, upper};
  svg::WriteChart(path, {panel});
}

int RunCompose(const CommonOptions& opts, std::int64_t k,
               std::vector<double> eps_list, std::vector<double> delta_list) {
  if (eps_list.empty() && delta_list.empty()) eps_list.push_back(1.0);
  const auto begin = std::chrono::steady_clock::now();

  const std::vector<MechanismSpec> specs = BuildSpecs(opts);
  ComposeReport report;
  report.mechanism = opts.mechanism;
  report.params = SpecParams(opts);
  report.k = k;
  report.algorithm = opts.algorithm +
                     (opts.loose_constants && opts.algorithm == "recursive"
                          ? " (loose constants)"
                          : "");
  report.eps_err = opts.eps_err;
  report.delta_err = opts.delta_err;
  report.direction =
      opts.mechanism == "subsampled-gaussian" ? opts.direction : "";

  bool first = true;
  for (const MechanismSpec& spec : specs) {
    const CompositionResult run = RunOne(spec, k, opts);
    std::vector<DeltaSandwich> points;
    points.reserve(eps_list.size());
    for (double eps : eps_list) points.push_back(Sandwich(run, eps));
    std::vector<EpsQuery> eps_points;
    for (double delta : delta_list) {
      const EpsilonTriple triple = EpsFromDelta(run, delta);
      eps_points.push_back(EpsQuery{delta, triple.lower, triple.estimate,
                                    triple.upper});
    }
    if (first) {
      report.points = points;
      report.eps_points = eps_points;
      report.buckets_per_stage = run.stage_buckets;
    } else {
      // worse (larger) bound of the two adjacency directions, pointwise
      for (std::size_t i = 0; i < points.size(); ++i) {
        report.points[i] = SandwichMax(report.points[i], points[i]);
      }
      for (std::size_t i = 0; i < eps_points.size(); ++i) {
        report.eps_points[i].eps_lower =
            std::max(report.eps_points[i].eps_lower, eps_points[i].eps_lower);
        report.eps_points[i].eps_estimate = std::max(
            report.eps_points[i].eps_estimate, eps_points[i].eps_estimate);
        report.eps_points[i].eps_upper =
            std::max(report.eps_points[i].eps_upper, eps_points[i].eps_upper);
      }
      for (std::size_t i = 0; i < report.buckets_per_stage.size() &&
                              i < run.stage_buckets.size();
           ++i) {
        report.buckets_per_stage[i] += run.stage_buckets[i];
      }
    }
    first = false;
  }
  report.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - begin)
                          .count();
  EmitReports({report}, opts);
  if (!opts.plot.empty()) PlotReport(report, opts.plot);
  return 0;
}

std::vector<double> ParseRange(const std::string& text, bool geometric) {
  double lo = 0, hi = 0;
  int count = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
      count < 2 || !(hi > lo) || (geometric && !(lo > 0))) {
    throw std::invalid_argument("range must be min:max:count (count >= 2)");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    values.push_back(geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t);
  }
  return values;
}

int RunBenchmarkCommand(const CommonOptions& opts,
                        const std::vector<std::int64_t>& k_list,
                        const std::vector<std::string>& algorithms, int repeats,
                        std::vector<double> eps_list) {
  if (eps_list.empty()) eps_list.push_back(1.0);
  BenchmarkConfig config;
  config.spec = BuildSpecs(opts).front();
  config.k_list = k_list;
  config.budget = ErrorBudget{opts.eps_err, opts.delta_err};
  for (const std::string& name : algorithms) {
    config.algorithms.push_back(AlgorithmFromString(name));
  }
  config.eps_points = eps_list;
  config.repeats = repeats;
  config.loose_constants = opts.loose_constants;
  const std::vector<BenchmarkRecord> records = RunBenchmark(config);

  const std::string format = opts.format.empty() ? "csv" : opts.format;
  std::ostringstream body;
  if (format == "json") {
    body << nlohmann::json(records).dump(2) << '\n';
  } else {
    WriteBenchmarkCsv(body, records);
  }
  if (opts.output.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream file(opts.output);
    if (!file) throw std::runtime_error("cannot write output file: " + opts.output);
    file << body.str();
  }

  if (!opts.plot.empty()) {
    svg::Panel runtime{"composition time vs k", "k", "ms", true, true, {}};
    svg::Panel buckets{"total buckets vs k", "k", "buckets", true, true, {}};
    for (const std::string& name : algorithms) {
      svg::Series time_series{name, {}}, bucket_series{name, {}};
      for (const BenchmarkRecord& r : records) {
        if (r.algorithm != name) continue;
        time_series.points.emplace_back(static_cast<double>(r.k), r.total_ms);
        std::int64_t total = 0;
        for (std::int64_t b : r.buckets_per_stage) total += b;
        bucket_series.points.emplace_back(static_cast<double>(r.k),
                                          static_cast<double>(total));
      }
      runtime.series.push_back(time_series);
      buckets.series.push_back(bucket_series);
    }
    svg::WriteChart(opts.plot, {runtime, buckets});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical privacy accountant: composes privacy loss "
               "distributions by staged FFT convolutions and reports rigorous "
               "bounds on the privacy curve"};
  app.require_subcommand(1);

  CommonOptions compose_opts, sweep_opts, bench_opts;
  std::int64_t compose_k = 0, sweep_k = 0;
  std::vector<double> compose_eps, compose_delta, sweep_eps, sweep_delta,
      bench_eps;
  std::string sweep_eps_range, sweep_delta_range;
  std::vector<std::int64_t> bench_k_list;
  std::vector<std::string> bench_algorithms{"single", "two-stage"};
  int bench_repeats = 20;

  CLI::App* compose = app.add_subcommand(
      "compose", "compose one mechanism k times and query the privacy curve");
  AddCommonOptions(compose, &compose_opts);
  compose->add_option("--compositions", compose_k, "number of compositions k")
      ->required()
      ->check(CLI::PositiveNumber);
  compose->add_option("--eps", compose_eps, "eps query points")->delimiter(',');
  compose->add_option("--delta", compose_delta, "delta targets to invert")
      ->delimiter(',');

  CLI::App* sweep = app.add_subcommand(
      "sweep", "one composition, a grid of eps or delta queries");
  AddCommonOptions(sweep, &sweep_opts);
  sweep->add_option("--compositions", sweep_k, "number of compositions k")
      ->required()
      ->check(CLI::PositiveNumber);
  sweep->add_option("--eps", sweep_eps, "explicit eps query points")->delimiter(',');
  sweep->add_option("--delta", sweep_delta, "explicit delta targets")->delimiter(',');
  sweep->add_option("--eps-range", sweep_eps_range, "eps grid min:max:count");
  sweep->add_option("--delta-range", sweep_delta_range,
                    "delta grid min:max:count (geometric)");

  CLI::App* bench = app.add_subcommand(
      "benchmark", "bucket counts and timings across algorithms and k");
  AddCommonOptions(bench, &bench_opts);
  bench->add_option("--k-list", bench_k_list, "composition counts to sweep")
      ->required()
      ->delimiter(',');
  bench->add_option("--repeats", bench_repeats, "timing repetitions per cell")
      ->check(CLI::PositiveNumber);
  bench->add_option("--algorithms", bench_algorithms,
                    "algorithms to compare (default single,two-stage)")
      ->delimiter(',');
  bench->add_option("--eps", bench_eps, "eps points reported per cell")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 2;
  }

  try {
    if (compose->parsed()) {
      return RunCompose(compose_opts, compose_k, compose_eps, compose_delta);
    }
    if (sweep->parsed()) {
      if (!sweep_eps_range.empty()) {
        for (double v : ParseRange(sweep_eps_range, false)) sweep_eps.push_back(v);
      }
      if (!sweep_delta_range.empty()) {
        for (double v : ParseRange(sweep_delta_range, true)) sweep_delta.push_back(v);
      }
      return RunCompose(sweep_opts, sweep_k, sweep_eps, sweep_delta);
    }
    return RunBenchmarkCommand(bench_opts, bench_k_list, bench_algorithms,
                               bench_repeats, bench_eps);
  } catch (const std::invalid_argument& error) {
    std::cerr << "argument error: " << error.what() << '\n';
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
}
