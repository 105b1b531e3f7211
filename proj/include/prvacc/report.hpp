#ifndef PRVACC_REPORT_HPP_
#define PRVACC_REPORT_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prvacc/accountants.hpp"

namespace prvacc {

// Rigorous bracket of the true privacy curve at one query point:
//   lower = max(0, delta(eps + eps_err) - delta_err)
//   upper = min(1, delta(eps - eps_err) + delta_err)
// evaluated on the computed grid variable.
struct DeltaSandwich {
  double eps;
  double lower;
  double estimate;
  double upper;
  double eps_err;
  double delta_err;
};

struct EpsilonTriple {
  double lower;
  double estimate;
  double upper;
};

// delta of a grid-supported variable: sum over support points above eps of
// mass * (1 - e^{eps - point}). Defined for every real eps.
double DeltaFromPmf(const DiscretePrv& p, double eps);

DeltaSandwich Sandwich(const CompositionResult& result, double eps);

// Pointwise max of two sandwiches at the same eps, for reporting the worse
// of the two adjacency directions.
DeltaSandwich SandwichMax(const DeltaSandwich& a, const DeltaSandwich& b);

// Smallest eps >= 0 with delta(eps) <= delta_target on each of the three
// sandwich curves, each solved by bisection to 1e-6 in eps.
// Throws NumericalError when delta_target lies below the floor of the upper
// curve (the message reports the attainable range).
EpsilonTriple EpsFromDelta(const CompositionResult& result, double delta_target);

// Inversion of the three sandwich curves at one delta target.
struct EpsQuery {
  double delta_target;
  double eps_lower;
  double eps_estimate;
  double eps_upper;

  bool operator==(const EpsQuery&) const = default;
};

// One composition run plus its query points, as written by the CLI.
struct ComposeReport {
  std::string mechanism;
  std::map<std::string, double> params;
  std::int64_t k = 0;
  std::string algorithm;
  double eps_err = 0;
  double delta_err = 0;
  std::string direction;  // "", "remove", "add" or "both"
  std::vector<DeltaSandwich> points;
  std::vector<EpsQuery> eps_points;
  std::vector<std::int64_t> buckets_per_stage;
  double runtime_ms = 0;

  bool operator==(const ComposeReport&) const = default;
};

// One benchmark configuration; timings are averages over the repeats.
// total_ms covers the composition stages; plan_ms is the parameter selection
// (tail-bound) work, reported separately since every algorithm needs the
// same kind of bound before it can run.
struct BenchmarkRecord {
  std::string mechanism;
  std::string algorithm;
  std::int64_t k = 0;
  double eps_err = 0;
  double delta_err = 0;
  int repeats = 0;
  std::vector<std::int64_t> buckets_per_stage;
  std::vector<double> stage_ms;
  double total_ms = 0;
  double plan_ms = 0;
  std::vector<DeltaSandwich> points;

  bool operator==(const BenchmarkRecord&) const = default;
};

bool operator==(const DeltaSandwich& a, const DeltaSandwich& b);

void to_json(nlohmann::json& j, const DeltaSandwich& s);
void from_json(const nlohmann::json& j, DeltaSandwich& s);
void to_json(nlohmann::json& j, const EpsQuery& q);
void from_json(const nlohmann::json& j, EpsQuery& q);
void to_json(nlohmann::json& j, const ComposeReport& r);
void from_json(const nlohmann::json& j, ComposeReport& r);
void to_json(nlohmann::json& j, const BenchmarkRecord& r);
void from_json(const nlohmann::json& j, BenchmarkRecord& r);

// CSV with one row per (k, algorithm, eps) and 17-significant-digit decimal
// rendering, so values survive a round trip bit-exactly.
std::string FormatDouble(double v);
void WriteComposeCsv(std::ostream& out, const std::vector<ComposeReport>& reports);
std::vector<ComposeReport> ReadComposeCsv(std::istream& in);
void WriteBenchmarkCsv(std::ostream& out, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> ReadBenchmarkCsv(std::istream& in);

struct BenchmarkConfig {
  MechanismSpec spec;
  std::vector<std::int64_t> k_list;
  ErrorBudget budget;
  std::vector<Algorithm> algorithms;
  std::vector<double> eps_points;
  int repeats = 20;
  bool loose_constants = false;
};

// Runs every (k, algorithm) cell of the configuration, timing each run on an
// isolated single task and averaging over the repeats.
std::vector<BenchmarkRecord> RunBenchmark(const BenchmarkConfig& config);

}  // namespace prvacc

#endif  // PRVACC_REPORT_HPP_
