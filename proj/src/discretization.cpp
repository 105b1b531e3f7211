#include "prvacc/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "prvacc/mechanisms.hpp"
#include "summation.hpp"

namespace prvacc {
namespace detail {

CanonicalShift CanonicalizeShift(double raw_shift, double mesh) {
  // carry = ceil((raw - h/2) / h) puts shift into (-h/2, h/2]; the fix-up
  // loops absorb one step of floating-point slop at the interval ends.
  auto carry = static_cast<std::int64_t>(std::ceil((raw_shift - mesh / 2) / mesh));
  double shift = raw_shift - static_cast<double>(carry) * mesh;
  while (shift > mesh / 2) {
    shift -= mesh;
    ++carry;
  }
  while (shift <= -mesh / 2) {
    shift += mesh;
    --carry;
  }
  return {shift, carry};
}

void RotateIndices(std::vector<double>& pmf, std::int64_t carry) {
  const auto m = static_cast<std::int64_t>(pmf.size());
  std::int64_t offset = carry % m;
  if (offset < 0) offset += m;
  if (offset == 0) return;
  // Mass at storage slot j moves to slot (j + offset) mod m, which is a left
  // rotation of the vector by m - offset.
  std::rotate(pmf.begin(), pmf.begin() + static_cast<std::ptrdiff_t>(m - offset), pmf.end());
}

}  // namespace detail

DiscretePrv::DiscretePrv(double mesh, double shift, std::vector<double> pmf)
    : mesh_(mesh), shift_(shift), pmf_(std::move(pmf)) {
  if (!(mesh_ > 0)) throw std::invalid_argument("mesh must be positive");
  if (pmf_.size() < 3 || pmf_.size() % 2 == 0) {
    throw std::invalid_argument("pmf must have odd size >= 3");
  }
  half_count_ = static_cast<std::int64_t>(pmf_.size() / 2);
  if (!(shift_ > -mesh_ / 2) || !(shift_ <= mesh_ / 2)) {
    throw std::invalid_argument("shift must lie in (-mesh/2, mesh/2]");
  }
  detail::CompensatedSum acc;
  for (double v : pmf_) {
    if (v < 0) throw std::invalid_argument("pmf entries must be nonnegative");
    acc.Add(v);
  }
  const double mass = acc.Result();
  if (std::abs(mass - 1.0) > 1e-12) {
    throw std::invalid_argument("pmf must sum to 1 within 1e-12");
  }
  cumulative_.resize(pmf_.size());
  detail::CompensatedSum run;
  for (std::size_t j = 0; j < pmf_.size(); ++j) {
    run.Add(pmf_[j]);
    cumulative_[j] = run.Result();
  }
}

double DiscretePrv::Mean() const {
  detail::CompensatedSum acc;
  for (std::int64_t i = -half_count_; i <= half_count_; ++i) {
    acc.Add(static_cast<double>(i) * MassAt(i));
  }
  return shift_ + mesh_ * acc.Result();
}

double DiscretePrv::TotalMass() const { return detail::SumAll(pmf_); }

double DiscretePrv::Cdf(double x) const {
  if (x < SupportPoint(-half_count_)) return 0.0;
  // Largest index with support point <= x.
  std::int64_t lo = -half_count_, hi = half_count_;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (SupportPoint(mid) <= x) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return cumulative_[static_cast<std::size_t>(lo + half_count_)];
}

std::function<double(double)> DiscretePrv::CdfFunction() const {
  return [copy = *this](double x) { return copy.Cdf(x); };
}

DiscretePrv Discretize(const std::function<double(double)>& cdf, double mean,
                       double mesh, double truncation) {
  if (!(mesh > 0)) throw std::invalid_argument("mesh must be positive");
  if (!(truncation > 0)) throw std::invalid_argument("truncation must be positive");
  const double ratio = truncation / mesh - 0.5;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (n < 1 || std::abs((static_cast<double>(n) + 0.5) * mesh - truncation) >
                   1e-12 * std::max(1.0, truncation)) {
    throw std::invalid_argument(
        "truncation must equal mesh * (1/2 + positive integer)");
  }
  const auto m = static_cast<std::size_t>(2 * n + 1);

  // Bucket edges (i +- 1/2) h, evaluated once each so masses telescope.
  std::vector<double> edge(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const auto i = static_cast<double>(static_cast<std::int64_t>(j) - n);
    edge[j] = cdf((i - 0.5) * mesh);
  }

  std::vector<double> pmf(m);
  for (std::size_t j = 0; j < m; ++j) {
    double q = edge[j + 1] - edge[j];
    if (q < 0) {
      // Rounding noise in CDF differences is clamped; anything bigger means
      // the input CDF is not monotone.
      if (q > -1e-16) {
        q = 0;
      } else {
        throw NumericalError("cdf produced a negative bucket mass");
      }
    }
    pmf[j] = q;
  }

  const double normalizer = detail::SumAll(pmf);
  if (!(normalizer > 0)) {
    throw NumericalError(
        "no mass inside the truncation window (truncation too small or "
        "degenerate cdf)");
  }
  for (double& q : pmf) q /= normalizer;

  detail::CompensatedSum grid_mean;
  for (std::size_t j = 0; j < m; ++j) {
    grid_mean.Add(static_cast<double>(static_cast<std::int64_t>(j) - n) * pmf[j]);
  }
  const double raw_shift = mean - mesh * grid_mean.Result();
  if (std::abs(raw_shift) > mesh / 2 + 1e-9) {
    throw NumericalError("mean-preserving shift exceeds mesh/2 (inconsistent "
                         "mean/cdf pair)");
  }
  auto canonical = detail::CanonicalizeShift(raw_shift, mesh);
  detail::RotateIndices(pmf, canonical.carry);
  return DiscretePrv(mesh, canonical.shift, std::move(pmf));
}

}  // namespace prvacc
