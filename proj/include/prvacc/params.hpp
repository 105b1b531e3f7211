#ifndef PRVACC_PARAMS_HPP_
#define PRVACC_PARAMS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "prvacc/mechanisms.hpp"

namespace prvacc {

// Additive approximation budget of a composition run: the computed grid
// variable satisfies |Y^{(+)k} - computed| <=_{delta_err} eps_err.
struct ErrorBudget {
  double eps_err;
  double delta_err;

  void Validate() const;  // throws std::invalid_argument
};

struct SingleStageParams {
  double mesh;
  double truncation;
  double eta;
};

struct TwoStageParams {
  std::int64_t k1;
  std::int64_t k2;
  std::int64_t remainder;  // k - k1 * k2, < k1
  double h1;
  double h2;
  double l1;
  double l2;
  double eta;
  double alpha0;
  double alpha1;
  double alpha2;
};

struct RecursiveParams {
  int stages;                      // t, with k = 2^t
  std::vector<double> mesh;        // h[0..t-1], nondecreasing
  std::vector<double> truncation;  // L[0..t-1], nondecreasing
  double eta;
  bool loose_constants;
};

// Expert overrides for users who already hold an external upper bound on
// eps_{Y^{(+)k}} (for example from an RDP accountant) and want to bypass the
// built-in Chernoff bound. Overridden truncations are still rounded up onto
// the half-integer grid of their mesh.
struct SingleStageOverrides {
  std::optional<double> mesh;
  std::optional<double> truncation;
};

struct TwoStageOverrides {
  std::optional<double> h1;
  std::optional<double> h2;
  std::optional<double> l1;
  std::optional<double> l2;
};

struct RecursiveOverrides {
  std::vector<double> mesh;        // empty or length t
  std::vector<double> truncation;  // empty or length t
};

// Smallest radius eps + alpha such that
//   delta_fn(eps) * (1 + e^{-eps-alpha}) / (1 - e^{-alpha}) <= target_tail,
// which bounds Pr[|Y| >= eps + alpha]. The simplified 4 delta / alpha form
// initializes the bisection bracket when alpha < 1.
// Throws NumericalError when the target is unreachable within the probed
// range (the message reports that range).
double TailRadius(const std::function<double(double)>& delta_fn,
                  double target_tail, double alpha);

// Rounds a raw truncation radius up (never down) onto mesh * (1/2 + Z_{>0}).
double RoundTruncationUp(double raw, double mesh);

// Number of grid buckets, 2 * (truncation / mesh - 1/2) + 1.
std::int64_t BucketCount(double mesh, double truncation);

std::int64_t TotalBuckets(const SingleStageParams& p);
std::int64_t TotalBuckets(const TwoStageParams& p);
std::int64_t TotalBuckets(const RecursiveParams& p);

// Baseline plan: one fine mesh over the full composed radius.
SingleStageParams SelectSingleStage(const Prv& prv, std::int64_t k,
                                    const ErrorBudget& budget,
                                    const SingleStageOverrides* overrides = nullptr);

// Two-stage plan with k1 = floor(sqrt(k)), k2 = floor(k / k1),
// r = k - k1 * k2, eta = delta_err / (8 k2 + 16),
// h1 = eps_err / sqrt(2 k1 k2 log(1/eta)), h2 = eps_err / sqrt(2 k2 log(1/eta)),
// and truncation radii from the tail bounds of the loss variable and its
// k1-fold and k-fold sums (via EpsUpperBound).
TwoStageParams SelectTwoStage(const Prv& prv, std::int64_t k,
                              const ErrorBudget& budget,
                              const TwoStageOverrides* overrides = nullptr);

// Recursive plan for k = 2^t. loose_constants drops the per-stage failure
// constants from base 8 to base 2; cheaper grids, but outside what the error
// analysis guarantees (flagged in run metadata).
RecursiveParams SelectRecursive(const Prv& prv, int stages,
                                const ErrorBudget& budget,
                                bool loose_constants = false,
                                const RecursiveOverrides* overrides = nullptr);

// Two-stage plan for a list of different mechanisms; group tail bounds sum
// the per-mechanism log-mgfs inside one Chernoff minimization.
TwoStageParams SelectHeterogeneous(const std::vector<const Prv*>& prvs,
                                   const ErrorBudget& budget,
                                   const TwoStageOverrides* overrides = nullptr);

}  // namespace prvacc

#endif  // PRVACC_PARAMS_HPP_
