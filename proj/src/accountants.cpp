#include "prvacc/accountants.hpp"

#include <chrono>
#include <cstdlib>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace prvacc {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DiscretePrv DiscretizeMechanism(const Prv& prv, double mesh, double truncation) {
  // Alg. 1's normalization supplies the conditioning to (-L, L]; only the
  // mean has to be conditioned explicitly.
  return Discretize([&prv](double x) { return prv.Cdf(x); },
                    prv.TruncatedMean(truncation), mesh, truncation);
}

DiscretePrv Rediscretize(const DiscretePrv& p, double mesh, double truncation) {
  return Discretize([&p](double x) { return p.Cdf(x); }, p.Mean(), mesh,
                    truncation);
}

unsigned MaxThreads() {
  if (const char* env = std::getenv("PRV_ACCOUNTANT_THREADS")) {
    const long value = std::strtol(env, nullptr, 10);
    if (value >= 1) return static_cast<unsigned>(value);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, count), possibly on several threads. Results and
// errors land in per-index slots, so the outcome does not depend on the
// schedule.
template <typename Fn>
void ParallelFor(std::int64_t count, const Fn& fn) {
  const unsigned threads =
      static_cast<unsigned>(std::min<std::int64_t>(count, MaxThreads()));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::int64_t i = t; i < count; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& worker : pool) worker.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace

std::string ToString(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSingleStage:
      return "single";
    case Algorithm::kTwoStage:
      return "two-stage";
    case Algorithm::kRecursive:
      return "recursive";
    case Algorithm::kHeterogeneous:
      return "heterogeneous";
  }
  return "unknown";
}

Algorithm AlgorithmFromString(const std::string& name) {
  if (name == "single") return Algorithm::kSingleStage;
  if (name == "two-stage") return Algorithm::kTwoStage;
  if (name == "recursive") return Algorithm::kRecursive;
  if (name == "heterogeneous") return Algorithm::kHeterogeneous;
  throw std::invalid_argument("unknown algorithm: " + name);
}

CompositionResult ComposeSingleStage(const MechanismSpec& spec, std::int64_t k,
                                     const ErrorBudget& budget,
                                     const SingleStageOverrides* overrides) {
  const auto prv = BuildPrv(spec);
  const SingleStageParams params = SelectSingleStage(*prv, k, budget, overrides);
  const auto start = Clock::now();
  DiscretePrv grid = DiscretizeMechanism(*prv, params.mesh, params.truncation);
  DiscretePrv final = SelfConvolvePower(grid, k);
  const double seconds = SecondsSince(start);
  return CompositionResult{std::move(final),
                           Algorithm::kSingleStage,
                           k,
                           budget,
                           params,
                           {BucketCount(params.mesh, params.truncation)},
                           {seconds},
                           Describe(spec)};
}

CompositionResult ComposeTwoStage(const MechanismSpec& spec, std::int64_t k,
                                  const ErrorBudget& budget,
                                  const TwoStageOverrides* overrides) {
  const auto prv = BuildPrv(spec);
  const TwoStageParams params = SelectTwoStage(*prv, k, budget, overrides);

  auto start = Clock::now();
  const DiscretePrv fine = DiscretizeMechanism(*prv, params.h1, params.l1);
  const DiscretePrv inner = SelfConvolvePower(fine, params.k1);
  const double stage1_seconds = SecondsSince(start);

  start = Clock::now();
  const DiscretePrv coarse = Rediscretize(inner, params.h2, params.l2);
  DiscretePrv final = SelfConvolvePower(coarse, params.k2);
  if (params.remainder > 0) {
    const DiscretePrv tail = SelfConvolvePower(fine, params.remainder);
    final = CircularConvolve(final, Rediscretize(tail, params.h2, params.l2));
  }
  const double stage2_seconds = SecondsSince(start);

  return CompositionResult{std::move(final),
                           Algorithm::kTwoStage,
                           k,
                           budget,
                           params,
                           {BucketCount(params.h1, params.l1),
                            BucketCount(params.h2, params.l2)},
                           {stage1_seconds, stage2_seconds},
                           Describe(spec)};
}

CompositionResult ComposeRecursive(const MechanismSpec& spec, std::int64_t k,
                                   const ErrorBudget& budget,
                                   bool loose_constants,
                                   const RecursiveOverrides* overrides) {
  if (k < 2 || (k & (k - 1)) != 0) {
    throw std::invalid_argument("recursive composition needs k a power of two");
  }
  int stages = 0;
  for (std::int64_t v = k; v > 1; v >>= 1) ++stages;
  const auto prv = BuildPrv(spec);
  const RecursiveParams params =
      SelectRecursive(*prv, stages, budget, loose_constants, overrides);

  std::vector<std::int64_t> buckets;
  std::vector<double> seconds;
  std::optional<DiscretePrv> current;
  for (int i = 0; i < stages; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double h = params.mesh[idx];
    const double l = params.truncation[idx];
    const auto start = Clock::now();
    const DiscretePrv grid = current.has_value()
                                 ? Rediscretize(*current, h, l)
                                 : DiscretizeMechanism(*prv, h, l);
    current = SelfConvolvePower(grid, 2);
    seconds.push_back(SecondsSince(start));
    buckets.push_back(BucketCount(h, l));
  }
  return CompositionResult{std::move(*current),
                           Algorithm::kRecursive,
                           k,
                           budget,
                           params,
                           std::move(buckets),
                           std::move(seconds),
                           Describe(spec)};
}

CompositionResult ComposeHeterogeneous(const std::vector<MechanismSpec>& specs,
                                       const ErrorBudget& budget,
                                       const TwoStageOverrides* overrides) {
  if (specs.empty()) {
    throw std::invalid_argument(
        "heterogeneous composition needs a nonempty mechanism list");
  }
  std::vector<std::unique_ptr<Prv>> prvs;
  prvs.reserve(specs.size());
  std::vector<const Prv*> views;
  views.reserve(specs.size());
  for (const MechanismSpec& spec : specs) {
    prvs.push_back(BuildPrv(spec));
    views.push_back(prvs.back().get());
  }
  const TwoStageParams params = SelectHeterogeneous(views, budget, overrides);
  const std::int64_t k1 = params.k1, k2 = params.k2, r = params.remainder;

  // Group phase on the fine grid: each of the k2 groups discretizes its k1
  // inputs, convolves them mod 2 L1, and re-discretizes onto the coarse grid.
  // Groups are independent; slots keep the combination order fixed.
  auto start = Clock::now();
  std::vector<std::optional<DiscretePrv>> groups(static_cast<std::size_t>(k2));
  ParallelFor(k2, [&](std::int64_t g) {
    std::vector<DiscretePrv> fine;
    fine.reserve(static_cast<std::size_t>(k1));
    for (std::int64_t j = g * k1; j < (g + 1) * k1; ++j) {
      fine.push_back(DiscretizeMechanism(*views[static_cast<std::size_t>(j)],
                                         params.h1, params.l1));
    }
    std::vector<const DiscretePrv*> parts;
    parts.reserve(fine.size());
    for (const DiscretePrv& p : fine) parts.push_back(&p);
    groups[static_cast<std::size_t>(g)] =
        Rediscretize(MultiConvolveWrapped(parts).result, params.h2, params.l2);
  });
  const double stage1_seconds = SecondsSince(start);

  start = Clock::now();
  std::vector<const DiscretePrv*> parts;
  parts.reserve(static_cast<std::size_t>(k2));
  for (const auto& g : groups) parts.push_back(&*g);
  DiscretePrv final = MultiConvolveWrapped(parts).result;
  if (r > 0) {
    std::vector<DiscretePrv> tail;
    tail.reserve(static_cast<std::size_t>(r));
    for (std::int64_t j = k1 * k2; j < static_cast<std::int64_t>(specs.size()); ++j) {
      tail.push_back(DiscretizeMechanism(*views[static_cast<std::size_t>(j)],
                                         params.h2, params.l2));
    }
    std::vector<const DiscretePrv*> fold{&final};
    for (const DiscretePrv& p : tail) fold.push_back(&p);
    final = MultiConvolveWrapped(fold).result;
  }
  const double stage2_seconds = SecondsSince(start);

  std::string descriptor = "heterogeneous n=" + std::to_string(specs.size()) +
                           " first=" + Describe(specs.front());
  return CompositionResult{std::move(final),
                           Algorithm::kHeterogeneous,
                           static_cast<std::int64_t>(specs.size()),
                           budget,
                           params,
                           {BucketCount(params.h1, params.l1),
                            BucketCount(params.h2, params.l2)},
                           {stage1_seconds, stage2_seconds},
                           std::move(descriptor)};
}

}  // namespace prvacc
