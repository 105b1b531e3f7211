#include "prvacc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "summation.hpp"

namespace prvacc {
namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> SplitLine(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

template <typename T>
std::string JoinNumbers(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    if constexpr (std::is_same_v<T, double>) {
      out += FormatDouble(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& joined) {
  std::vector<double> out;
  for (const auto& token : SplitLine(joined, ';')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  return out;
}

std::vector<std::int64_t> ParseInts(const std::string& joined) {
  std::vector<std::int64_t> out;
  for (const auto& token : SplitLine(joined, ';')) {
    if (!token.empty()) out.push_back(std::stoll(token));
  }
  return out;
}

std::string JoinParams(const std::map<std::string, double>& params) {
  std::string out;
  for (const auto& [name, value] : params) {
    if (!out.empty()) out += ';';
    out += name + '=' + FormatDouble(value);
  }
  return out;
}

std::map<std::string, double> ParseParams(const std::string& joined) {
  std::map<std::string, double> out;
  for (const auto& token : SplitLine(joined, ';')) {
    if (token.empty()) continue;
    const auto pos = token.find('=');
    if (pos == std::string::npos) {
      throw std::invalid_argument("malformed params field: " + token);
    }
    out[token.substr(0, pos)] = std::stod(token.substr(pos + 1));
  }
  return out;
}

}  // namespace

double DeltaFromPmf(const DiscretePrv& p, double eps) {
  const std::int64_t n = p.half_count();
  if (eps >= p.SupportPoint(n)) return 0;
  // First index whose support point exceeds eps.
  std::int64_t lo = -n, hi = n;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (p.SupportPoint(mid) > eps) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  detail::CompensatedSum acc;
  for (std::int64_t i = lo; i <= n; ++i) {
    acc.Add(p.MassAt(i) * -std::expm1(eps - p.SupportPoint(i)));
  }
  return std::min(1.0, std::max(0.0, acc.Result()));
}

DeltaSandwich Sandwich(const CompositionResult& result, double eps) {
  const double e = result.budget.eps_err;
  const double d = result.budget.delta_err;
  return DeltaSandwich{
      eps,
      std::max(0.0, DeltaFromPmf(result.final, eps + e) - d),
      DeltaFromPmf(result.final, eps),
      std::min(1.0, DeltaFromPmf(result.final, eps - e) + d),
      e,
      d,
  };
}

DeltaSandwich SandwichMax(const DeltaSandwich& a, const DeltaSandwich& b) {
  if (a.eps != b.eps) {
    throw std::invalid_argument("sandwich max needs a common query point");
  }
  return DeltaSandwich{a.eps,
                       std::max(a.lower, b.lower),
                       std::max(a.estimate, b.estimate),
                       std::max(a.upper, b.upper),
                       std::max(a.eps_err, b.eps_err),
                       std::max(a.delta_err, b.delta_err)};
}

EpsilonTriple EpsFromDelta(const CompositionResult& result, double delta_target) {
  if (!(delta_target > 0) || delta_target > 1) {
    throw std::invalid_argument("delta target must lie in (0, 1]");
  }
  const double roof = result.final.truncation() + result.budget.eps_err + 1;
  const auto solve = [&](auto&& curve) {
    if (curve(0.0) <= delta_target) return 0.0;
    const double floor = curve(roof);
    if (floor > delta_target) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "delta target %.3e below the curve floor %.3e (attainable "
                    "range is [%.3e, 1])",
                    delta_target, floor, floor);
      throw NumericalError(msg);
    }
    double lo = 0, hi = roof;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      if (curve(mid) <= delta_target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  };
  const double e = result.budget.eps_err;
  const double d = result.budget.delta_err;
  EpsilonTriple triple;
  triple.lower = solve([&](double eps) {
    return std::max(0.0, DeltaFromPmf(result.final, eps + e) - d);
  });
  triple.estimate = solve([&](double eps) { return DeltaFromPmf(result.final, eps); });
  triple.upper = solve([&](double eps) {
    return std::min(1.0, DeltaFromPmf(result.final, eps - e) + d);
  });
  return triple;
}

bool operator==(const DeltaSandwich& a, const DeltaSandwich& b) {
  return a.eps == b.eps && a.lower == b.lower && a.estimate == b.estimate &&
         a.upper == b.upper && a.eps_err == b.eps_err && a.delta_err == b.delta_err;
}

void to_json(nlohmann::json& j, const DeltaSandwich& s) {
  j = nlohmann::json{{"eps", s.eps},
                     {"delta_lower", s.lower},
                     {"delta_est", s.estimate},
                     {"delta_upper", s.upper},
                     {"eps_err", s.eps_err},
                     {"delta_err", s.delta_err}};
}

void from_json(const nlohmann::json& j, DeltaSandwich& s) {
  j.at("eps").get_to(s.eps);
  j.at("delta_lower").get_to(s.lower);
  j.at("delta_est").get_to(s.estimate);
  j.at("delta_upper").get_to(s.upper);
  j.at("eps_err").get_to(s.eps_err);
  j.at("delta_err").get_to(s.delta_err);
}

void to_json(nlohmann::json& j, const EpsQuery& q) {
  j = nlohmann::json{{"delta_target", q.delta_target},
                     {"eps_lower", q.eps_lower},
                     {"eps_est", q.eps_estimate},
                     {"eps_upper", q.eps_upper}};
}

void from_json(const nlohmann::json& j, EpsQuery& q) {
  j.at("delta_target").get_to(q.delta_target);
  j.at("eps_lower").get_to(q.eps_lower);
  j.at("eps_est").get_to(q.eps_estimate);
  j.at("eps_upper").get_to(q.eps_upper);
}

void to_json(nlohmann::json& j, const ComposeReport& r) {
  j = nlohmann::json{{"mechanism", r.mechanism},
                     {"params", r.params},
                     {"k", r.k},
                     {"algorithm", r.algorithm},
                     {"eps_err", r.eps_err},
                     {"delta_err", r.delta_err},
                     {"direction", r.direction},
                     {"points", r.points},
                     {"eps_points", r.eps_points},
                     {"buckets_per_stage", r.buckets_per_stage},
                     {"runtime_ms", r.runtime_ms}};
}

void from_json(const nlohmann::json& j, ComposeReport& r) {
  j.at("mechanism").get_to(r.mechanism);
  r.params = j.at("params").get<std::map<std::string, double>>();
  j.at("k").get_to(r.k);
  j.at("algorithm").get_to(r.algorithm);
  j.at("eps_err").get_to(r.eps_err);
  j.at("delta_err").get_to(r.delta_err);
  j.at("direction").get_to(r.direction);
  j.at("points").get_to(r.points);
  j.at("eps_points").get_to(r.eps_points);
  j.at("buckets_per_stage").get_to(r.buckets_per_stage);
  j.at("runtime_ms").get_to(r.runtime_ms);
}

void to_json(nlohmann::json& j, const BenchmarkRecord& r) {
  j = nlohmann::json{{"mechanism", r.mechanism},
                     {"algorithm", r.algorithm},
                     {"k", r.k},
                     {"eps_err", r.eps_err},
                     {"delta_err", r.delta_err},
                     {"repeats", r.repeats},
                     {"buckets_per_stage", r.buckets_per_stage},
                     {"stage_ms", r.stage_ms},
                     {"total_ms", r.total_ms},
                     {"plan_ms", r.plan_ms},
                     {"points", r.points}};
}

void from_json(const nlohmann::json& j, BenchmarkRecord& r) {
  j.at("mechanism").get_to(r.mechanism);
  j.at("algorithm").get_to(r.algorithm);
  j.at("k").get_to(r.k);
  j.at("eps_err").get_to(r.eps_err);
  j.at("delta_err").get_to(r.delta_err);
  j.at("repeats").get_to(r.repeats);
  j.at("buckets_per_stage").get_to(r.buckets_per_stage);
  j.at("stage_ms").get_to(r.stage_ms);
  j.at("total_ms").get_to(r.total_ms);
  j.at("plan_ms").get_to(r.plan_ms);
  j.at("points").get_to(r.points);
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static constexpr char kComposeHeader[] =
    "mechanism,params,k,algorithm,eps_err,delta_err,direction,kind,query,"
    "lower,estimate,upper,buckets_per_stage,runtime_ms";

void WriteComposeCsv(std::ostream& out, const std::vector<ComposeReport>& reports) {
  out << kComposeHeader << '\n';
  for (const ComposeReport& r : reports) {
    const std::string prefix = r.mechanism + ',' + JoinParams(r.params) + ',' +
                               std::to_string(r.k) + ',' + r.algorithm + ',' +
                               FormatDouble(r.eps_err) + ',' +
                               FormatDouble(r.delta_err) + ',' + r.direction + ',';
    const std::string suffix =
        ',' + JoinNumbers(r.buckets_per_stage) + ',' + FormatDouble(r.runtime_ms);
    for (const DeltaSandwich& p : r.points) {
      out << prefix << "delta," << FormatDouble(p.eps) << ','
          << FormatDouble(p.lower) << ',' << FormatDouble(p.estimate) << ','
          << FormatDouble(p.upper) << suffix << '\n';
    }
    for (const EpsQuery& q : r.eps_points) {
      out << prefix << "eps," << FormatDouble(q.delta_target) << ','
          << FormatDouble(q.eps_lower) << ',' << FormatDouble(q.eps_estimate)
          << ',' << FormatDouble(q.eps_upper) << suffix << '\n';
    }
  }
}

std::vector<ComposeReport> ReadComposeCsv(std::istream& in) {
  std::vector<ComposeReport> reports;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == kComposeHeader) continue;
    }
    const auto fields = SplitLine(line, ',');
    if (fields.size() != 14) {
      throw std::invalid_argument("malformed compose csv row: " + line);
    }
    ComposeReport row;
    row.mechanism = fields[0];
    row.params = ParseParams(fields[1]);
    row.k = std::stoll(fields[2]);
    row.algorithm = fields[3];
    row.eps_err = std::stod(fields[4]);
    row.delta_err = std::stod(fields[5]);
    row.direction = fields[6];
    row.buckets_per_stage = ParseInts(fields[12]);
    row.runtime_ms = std::stod(fields[13]);
    const bool same_report =
        !reports.empty() && reports.back().mechanism == row.mechanism &&
        reports.back().params == row.params && reports.back().k == row.k &&
        reports.back().algorithm == row.algorithm &&
        reports.back().eps_err == row.eps_err &&
        reports.back().delta_err == row.delta_err &&
        reports.back().direction == row.direction &&
        reports.back().buckets_per_stage == row.buckets_per_stage &&
        reports.back().runtime_ms == row.runtime_ms;
    if (!same_report) reports.push_back(row);
    ComposeReport& target = reports.back();
    if (fields[7] == "delta") {
      target.points.push_back(DeltaSandwich{std::stod(fields[8]),
                                            std::stod(fields[9]),
                                            std::stod(fields[10]),
                                            std::stod(fields[11]), row.eps_err,
                                            row.delta_err});
    } else if (fields[7] == "eps") {
      target.eps_points.push_back(EpsQuery{std::stod(fields[8]),
                                           std::stod(fields[9]),
                                           std::stod(fields[10]),
                                           std::stod(fields[11])});
    } else {
      throw std::invalid_argument("unknown csv row kind: " + fields[7]);
    }
  }
  return reports;
}

static constexpr char kBenchmarkHeader[] =
    "mechanism,algorithm,k,eps_err,delta_err,repeats,buckets_per_stage,"
    "stage_ms,total_ms,plan_ms,eps,delta_lower,delta_est,delta_upper";

void WriteBenchmarkCsv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kBenchmarkHeader << '\n';
  for (const BenchmarkRecord& r : records) {
    const std::string prefix =
        r.mechanism + ',' + r.algorithm + ',' + std::to_string(r.k) + ',' +
        FormatDouble(r.eps_err) + ',' + FormatDouble(r.delta_err) + ',' +
        std::to_string(r.repeats) + ',' + JoinNumbers(r.buckets_per_stage) +
        ',' + JoinNumbers(r.stage_ms) + ',' + FormatDouble(r.total_ms) + ',' +
        FormatDouble(r.plan_ms) + ',';
    if (r.points.empty()) {
      out << prefix << ",,,\n";
      continue;
    }
    for (const DeltaSandwich& p : r.points) {
      out << prefix << FormatDouble(p.eps) << ',' << FormatDouble(p.lower)
          << ',' << FormatDouble(p.estimate) << ',' << FormatDouble(p.upper)
          << '\n';
    }
  }
}

std::vector<BenchmarkRecord> ReadBenchmarkCsv(std::istream& in) {
  std::vector<BenchmarkRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == kBenchmarkHeader) continue;
    }
    const auto fields = SplitLine(line, ',');
    if (fields.size() != 14) {
      throw std::invalid_argument("malformed benchmark csv row: " + line);
    }
    BenchmarkRecord row;
    row.mechanism = fields[0];
    row.algorithm = fields[1];
    row.k = std::stoll(fields[2]);
    row.eps_err = std::stod(fields[3]);
    row.delta_err = std::stod(fields[4]);
    row.repeats = std::stoi(fields[5]);
    row.buckets_per_stage = ParseInts(fields[6]);
    row.stage_ms = ParseDoubles(fields[7]);
    row.total_ms = std::stod(fields[8]);
    row.plan_ms = std::stod(fields[9]);
    const bool same_record =
        !records.empty() && records.back().mechanism == row.mechanism &&
        records.back().algorithm == row.algorithm && records.back().k == row.k &&
        records.back().eps_err == row.eps_err &&
        records.back().delta_err == row.delta_err &&
        records.back().repeats == row.repeats &&
        records.back().buckets_per_stage == row.buckets_per_stage &&
        records.back().stage_ms == row.stage_ms &&
        records.back().total_ms == row.total_ms &&
        records.back().plan_ms == row.plan_ms;
    if (!same_record) records.push_back(row);
    if (!fields[10].empty()) {
      records.back().points.push_back(
          DeltaSandwich{std::stod(fields[10]), std::stod(fields[11]),
                        std::stod(fields[12]), std::stod(fields[13]),
                        row.eps_err, row.delta_err});
    }
  }
  return records;
}

std::vector<BenchmarkRecord> RunBenchmark(const BenchmarkConfig& config) {
  config.budget.Validate();
  if (config.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  std::vector<BenchmarkRecord> records;
  for (std::int64_t k : config.k_list) {
    for (Algorithm algorithm : config.algorithms) {
      BenchmarkRecord record;
      record.mechanism = Describe(config.spec);
      record.algorithm = ToString(algorithm);
      record.k = k;
      record.eps_err = config.budget.eps_err;
      record.delta_err = config.budget.delta_err;
      record.repeats = config.repeats;
      for (int rep = 0; rep < config.repeats; ++rep) {
        const auto begin = Clock::now();
        CompositionResult result = [&] {
          switch (algorithm) {
            case Algorithm::kSingleStage:
              return ComposeSingleStage(config.spec, k, config.budget);
            case Algorithm::kTwoStage:
              return ComposeTwoStage(config.spec, k, config.budget);
            case Algorithm::kRecursive:
              return ComposeRecursive(config.spec, k, config.budget,
                                      config.loose_constants);
            default:
              throw std::invalid_argument(
                  "benchmark supports single, two-stage and recursive");
          }
        }();
        const double wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - begin).count();
        detail::CompensatedSum stage_total;
        for (double s : result.stage_seconds) stage_total.Add(s);
        const double stages_ms = 1e3 * stage_total.Result();
        record.total_ms += stages_ms / config.repeats;
        record.plan_ms += (wall_ms - stages_ms) / config.repeats;
        if (record.stage_ms.empty()) {
          record.stage_ms.assign(result.stage_seconds.size(), 0.0);
        }
        for (std::size_t i = 0; i < result.stage_seconds.size(); ++i) {
          record.stage_ms[i] += 1e3 * result.stage_seconds[i] / config.repeats;
        }
        if (rep == 0) {
          record.buckets_per_stage = result.stage_buckets;
          for (double eps : config.eps_points) {
            record.points.push_back(Sandwich(result, eps));
          }
        }
      }
      records.push_back(std::move(record));
    }
  }
  return records;
}

}  // namespace prvacc
