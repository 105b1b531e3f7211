#ifndef PRVACC_ACCOUNTANTS_HPP_
#define PRVACC_ACCOUNTANTS_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "prvacc/convolution.hpp"
#include "prvacc/discretization.hpp"
#include "prvacc/mechanisms.hpp"
#include "prvacc/params.hpp"

namespace prvacc {

enum class Algorithm { kSingleStage, kTwoStage, kRecursive, kHeterogeneous };

std::string ToString(Algorithm algorithm);
Algorithm AlgorithmFromString(const std::string& name);

using CompositionPlan =
    std::variant<SingleStageParams, TwoStageParams, RecursiveParams>;

struct CompositionResult {
  DiscretePrv final;
  Algorithm algorithm;
  std::int64_t compositions;  // k
  ErrorBudget budget;
  CompositionPlan plan;
  std::vector<std::int64_t> stage_buckets;  // one entry per stage
  std::vector<double> stage_seconds;        // wall time per stage
  std::string mechanism;                    // descriptor of the input(s)
};

// GLW-style baseline: one discretization at the fine mesh over the full
// radius, one k-fold self-convolution. Serves as the accuracy cross-check
// and as the denominator of the benchmark speedups.
CompositionResult ComposeSingleStage(const MechanismSpec& spec, std::int64_t k,
                                     const ErrorBudget& budget,
                                     const SingleStageOverrides* overrides = nullptr);

// Two-stage pipeline: condition to |Y| <= L1, discretize at (h1, L1),
// self-power k1 mod 2 L1, re-discretize at (h2, L2), self-power k2 mod 2 L2,
// fold in the r-fold remainder.
CompositionResult ComposeTwoStage(const MechanismSpec& spec, std::int64_t k,
                                  const ErrorBudget& budget,
                                  const TwoStageOverrides* overrides = nullptr);

// log2(k) rounds of discretize-then-square with growing (h_i, L_i).
// k must be a power of two.
CompositionResult ComposeRecursive(const MechanismSpec& spec, std::int64_t k,
                                   const ErrorBudget& budget,
                                   bool loose_constants = false,
                                   const RecursiveOverrides* overrides = nullptr);

// Two-stage pipeline over a list of different mechanisms: per-mechanism
// discretizations, k2 groups of k1 operands convolved mod 2 L1, then the
// group results and the r remainder inputs convolved mod 2 L2. The group
// convolutions are independent and may run in parallel (bounded by the
// PRV_ACCOUNTANT_THREADS environment variable); results are combined in a
// fixed order so the output is identical regardless of schedule.
CompositionResult ComposeHeterogeneous(const std::vector<MechanismSpec>& specs,
                                       const ErrorBudget& budget,
                                       const TwoStageOverrides* overrides = nullptr);

}  // namespace prvacc

#endif  // PRVACC_ACCOUNTANTS_HPP_
