#include "prvacc/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace prvacc {
namespace {

constexpr std::int64_t kMaxBuckets = std::int64_t{1} << 31;

std::int64_t FloorSqrt(std::int64_t k) {
  auto r = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(k))));
  while ((r + 1) * (r + 1) <= k) ++r;
  while (r * r > k) --r;
  return r;
}

void GuardGridSize(double mesh, double truncation) {
  const double buckets = 2 * (truncation / mesh - 0.5) + 1;
  if (!(buckets < static_cast<double>(kMaxBuckets))) {
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "grid would need %.3g buckets (limit 2^31); loosen the "
                  "budget or override the plan",
                  buckets);
    throw NumericalError(msg);
  }
}

struct Factorization {
  std::int64_t k1;
  std::int64_t k2;
  std::int64_t remainder;
};

Factorization Factor(std::int64_t k) {
  const std::int64_t k1 = FloorSqrt(k);
  const std::int64_t k2 = k / k1;
  return {k1, k2, k - k1 * k2};
}

}  // namespace

void ErrorBudget::Validate() const {
  if (!(eps_err > 0)) throw std::invalid_argument("eps_err must be positive");
  if (!(delta_err > 0) || !(delta_err < 1)) {
    throw std::invalid_argument("delta_err must lie in (0, 1)");
  }
}

double TailRadius(const std::function<double(double)>& delta_fn,
                  double target_tail, double alpha) {
  if (!(target_tail > 0) || !(target_tail < 1)) {
    throw std::invalid_argument("target_tail must lie in (0, 1)");
  }
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const double factor_den = -std::expm1(-alpha);  // 1 - e^{-alpha}
  const auto bound = [&](double eps) {
    return delta_fn(eps) * (1 + std::exp(-eps - alpha)) / factor_den;
  };
  if (bound(0) <= target_tail) return alpha;

  double hi = std::max(1.0, alpha);
  if (alpha < 1) {
    // The 4 delta / alpha relaxation dominates the sharp bound, so its
    // crossing point brackets the sharp one.
    const auto relaxed = [&](double eps) { return 4 * delta_fn(eps) / alpha; };
    while (relaxed(hi) > target_tail && hi < 1e12) hi *= 2;
  }
  while (bound(hi) > target_tail) {
    hi *= 2;
    if (hi > 1e12) {
      char msg[128];
      std::snprintf(msg, sizeof(msg),
                    "tail target %.3e unreachable for eps in [0, %.3e]",
                    target_tail, hi);
      throw NumericalError(msg);
    }
  }
  double lo = 0;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (bound(mid) <= target_tail) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi + alpha;
}

double RoundTruncationUp(double raw, double mesh) {
  if (!(mesh > 0)) throw std::invalid_argument("mesh must be positive");
  if (!(raw > 0)) throw std::invalid_argument("truncation must be positive");
  auto n = static_cast<std::int64_t>(std::ceil(raw / mesh - 0.5));
  n = std::max<std::int64_t>(n, 1);
  double rounded = (static_cast<double>(n) + 0.5) * mesh;
  if (rounded < raw) rounded = (static_cast<double>(++n) + 0.5) * mesh;
  return rounded;
}

std::int64_t BucketCount(double mesh, double truncation) {
  const auto n = static_cast<std::int64_t>(std::llround(truncation / mesh - 0.5));
  return 2 * n + 1;
}

std::int64_t TotalBuckets(const SingleStageParams& p) {
  return BucketCount(p.mesh, p.truncation);
}

std::int64_t TotalBuckets(const TwoStageParams& p) {
  return BucketCount(p.h1, p.l1) + BucketCount(p.h2, p.l2);
}

std::int64_t TotalBuckets(const RecursiveParams& p) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < p.mesh.size(); ++i) {
    total += BucketCount(p.mesh[i], p.truncation[i]);
  }
  return total;
}

SingleStageParams SelectSingleStage(const Prv& prv, std::int64_t k,
                                    const ErrorBudget& budget,
                                    const SingleStageOverrides* overrides) {
  budget.Validate();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto [k1, k2, r] = Factor(k);
  (void)k1;
  (void)r;
  const double eta = budget.delta_err / (8 * static_cast<double>(k2) + 16);
  double mesh = budget.eps_err /
                std::sqrt(2 * static_cast<double>(k) * std::log(1 / eta));
  if (overrides != nullptr && overrides->mesh) mesh = *overrides->mesh;
  double truncation;
  if (overrides != nullptr && overrides->truncation) {
    truncation = *overrides->truncation;
  } else {
    truncation = EpsUpperBound(prv, k, budget.eps_err * budget.delta_err / 16) +
                 2 * budget.eps_err;
  }
  truncation = RoundTruncationUp(truncation, mesh);
  GuardGridSize(mesh, truncation);
  return {mesh, truncation, eta};
}

TwoStageParams SelectTwoStage(const Prv& prv, std::int64_t k,
                              const ErrorBudget& budget,
                              const TwoStageOverrides* overrides) {
  budget.Validate();
  if (k < 2) throw std::invalid_argument("two-stage composition needs k >= 2");
  const auto [k1, k2, r] = Factor(k);
  const double eps = budget.eps_err;
  const double eta = budget.delta_err / (8 * static_cast<double>(k2) + 16);
  const double log_inv_eta = std::log(1 / eta);
  const double sqrt_k2 = std::sqrt(static_cast<double>(k2));

  TwoStageParams params;
  params.k1 = k1;
  params.k2 = k2;
  params.remainder = r;
  params.eta = eta;
  params.alpha0 = eps / sqrt_k2;
  params.alpha1 = eps / (2 * sqrt_k2);
  params.alpha2 = eps;
  params.h1 = eps / std::sqrt(2 * static_cast<double>(k1) *
                              static_cast<double>(k2) * log_inv_eta);
  params.h2 = eps / std::sqrt(2 * static_cast<double>(k2) * log_inv_eta);
  if (overrides != nullptr) {
    if (overrides->h1) params.h1 = *overrides->h1;
    if (overrides->h2) params.h2 = *overrides->h2;
  }
  if (!(params.h1 <= params.h2)) {
    throw std::invalid_argument("mesh overrides must satisfy h1 <= h2");
  }

  double l1_raw;
  if (overrides != nullptr && overrides->l1) {
    l1_raw = *overrides->l1;
  } else {
    const double single = EpsUpperBound(
        prv, 1,
        params.alpha0 * budget.delta_err /
            (16 * static_cast<double>(k1) * static_cast<double>(k2)));
    const double inner = EpsUpperBound(
        prv, k1, params.alpha1 * budget.delta_err / (32 * static_cast<double>(k2)));
    l1_raw = std::max(single + params.alpha0,
                      inner + eps / (2 * sqrt_k2) + params.alpha1);
  }
  params.l1 = RoundTruncationUp(l1_raw, params.h1);

  double l2_raw;
  if (overrides != nullptr && overrides->l2) {
    l2_raw = *overrides->l2;
  } else {
    const double full =
        EpsUpperBound(prv, k, params.alpha2 * budget.delta_err / 16);
    l2_raw = full + eps + params.alpha2;
  }
  params.l2 = RoundTruncationUp(std::max(l2_raw, params.l1), params.h2);
  GuardGridSize(params.h1, params.l1);
  GuardGridSize(params.h2, params.l2);
  return params;
}

RecursiveParams SelectRecursive(const Prv& prv, int stages,
                                const ErrorBudget& budget, bool loose_constants,
                                const RecursiveOverrides* overrides) {
  budget.Validate();
  if (stages < 1) throw std::invalid_argument("stages must be >= 1");
  if (stages > 60) throw std::invalid_argument("stages must be <= 60");
  const double t = stages;
  const double base = loose_constants ? 2.0 : 8.0;
  const double eta =
      budget.delta_err / (2 * (t + 2) * std::pow(base, t + 1));
  const double log2eta = std::log(2 / eta);

  RecursiveParams params;
  params.stages = stages;
  params.eta = eta;
  params.loose_constants = loose_constants;
  params.mesh.resize(static_cast<std::size_t>(stages));
  params.truncation.resize(static_cast<std::size_t>(stages));

  if (overrides != nullptr && !overrides->mesh.empty() &&
      overrides->mesh.size() != static_cast<std::size_t>(stages)) {
    throw std::invalid_argument("mesh override must have one entry per stage");
  }
  if (overrides != nullptr && !overrides->truncation.empty() &&
      overrides->truncation.size() != static_cast<std::size_t>(stages)) {
    throw std::invalid_argument(
        "truncation override must have one entry per stage");
  }

  double previous = 0;
  for (int i = 1; i <= stages; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    double h = budget.eps_err /
               (t * std::sqrt(std::exp2(static_cast<double>(stages - i)) * log2eta));
    if (overrides != nullptr && !overrides->mesh.empty()) {
      h = overrides->mesh[idx];
    }
    double l_raw;
    if (overrides != nullptr && !overrides->truncation.empty()) {
      l_raw = overrides->truncation[idx];
    } else {
      // Per-stage tail budget eta h_i / 4 makes every (4/alpha_i) delta term
      // at most eta with alpha_i = h_i; the drift allowance covers the
      // accumulated discretization shifts of the first i stages.
      const double tail_budget = eta * h / 4;
      const double drift = h * (3 + 2 * i * std::sqrt(0.5 * log2eta));
      l_raw = EpsUpperBound(prv, std::int64_t{1} << i, tail_budget) + drift;
    }
    const double l = RoundTruncationUp(std::max(l_raw, previous), h);
    GuardGridSize(h, l);
    params.mesh[idx] = h;
    params.truncation[idx] = l;
    previous = l;
  }
  for (int i = 1; i < stages; ++i) {
    if (params.mesh[static_cast<std::size_t>(i)] <
        params.mesh[static_cast<std::size_t>(i - 1)]) {
      throw std::invalid_argument("mesh overrides must be nondecreasing");
    }
  }
  return params;
}

TwoStageParams SelectHeterogeneous(const std::vector<const Prv*>& prvs,
                                   const ErrorBudget& budget,
                                   const TwoStageOverrides* overrides) {
  budget.Validate();
  const auto k = static_cast<std::int64_t>(prvs.size());
  if (k < 1) throw std::invalid_argument("empty mechanism list");
  const auto [k1, k2, r] = Factor(k);
  const double eps = budget.eps_err;
  const double eta = budget.delta_err / (8 * static_cast<double>(k2) + 16);
  const double log_inv_eta = std::log(1 / eta);
  const double sqrt_k2 = std::sqrt(static_cast<double>(k2));

  TwoStageParams params;
  params.k1 = k1;
  params.k2 = k2;
  params.remainder = r;
  params.eta = eta;
  params.alpha0 = eps / sqrt_k2;
  params.alpha1 = eps / (2 * sqrt_k2);
  params.alpha2 = eps;
  params.h1 = eps / std::sqrt(2 * static_cast<double>(k1) *
                              static_cast<double>(k2) * log_inv_eta);
  params.h2 = eps / std::sqrt(2 * static_cast<double>(k2) * log_inv_eta);
  if (overrides != nullptr) {
    if (overrides->h1) params.h1 = *overrides->h1;
    if (overrides->h2) params.h2 = *overrides->h2;
  }
  if (!(params.h1 <= params.h2)) {
    throw std::invalid_argument("mesh overrides must satisfy h1 <= h2");
  }

  double l1_raw;
  if (overrides != nullptr && overrides->l1) {
    l1_raw = *overrides->l1;
  } else {
    const double single_budget =
        params.alpha0 * budget.delta_err /
        (16 * static_cast<double>(k1) * static_cast<double>(k2));
    double single = 0;
    for (const Prv* prv : prvs) {
      single = std::max(single, EpsUpperBound(*prv, 1, single_budget) + params.alpha0);
    }
    const double group_budget =
        params.alpha1 * budget.delta_err / (32 * static_cast<double>(k2));
    double group = 0;
    for (std::int64_t g = 0; g < k2; ++g) {
      std::vector<const Prv*> members(
          prvs.begin() + static_cast<std::ptrdiff_t>(g * k1),
          prvs.begin() + static_cast<std::ptrdiff_t>((g + 1) * k1));
      group = std::max(group, GroupEpsUpperBound(members, group_budget) +
                                  eps / (2 * sqrt_k2) + params.alpha1);
    }
    l1_raw = std::max(single, group);
  }
  params.l1 = RoundTruncationUp(l1_raw, params.h1);

  double l2_raw;
  if (overrides != nullptr && overrides->l2) {
    l2_raw = *overrides->l2;
  } else {
    l2_raw = GroupEpsUpperBound(prvs, params.alpha2 * budget.delta_err / 16) +
             eps + params.alpha2;
  }
  params.l2 = RoundTruncationUp(std::max(l2_raw, params.l1), params.h2);
  GuardGridSize(params.h1, params.l1);
  GuardGridSize(params.h2, params.l2);
  return params;
}

}  // namespace prvacc
