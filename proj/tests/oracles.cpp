#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracles {
namespace {

double Phi(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2); }

}  // namespace

double GaussianFoldDelta(double sigma, std::int64_t folds, double eps) {
  const double s = sigma / std::sqrt(static_cast<double>(folds));
  return Phi(0.5 / s - eps * s) - std::exp(eps) * Phi(-0.5 / s - eps * s);
}

std::vector<double> NaiveCyclicConvolve(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() % 2 == 0) {
    throw std::invalid_argument("operands must share an odd size");
  }
  const auto m = static_cast<std::int64_t>(a.size());
  const std::int64_t n = m / 2;
  std::vector<double> out(a.size(), 0.0);
  for (std::int64_t i = -n; i <= n; ++i) {
    for (std::int64_t j = -n; j <= n; ++j) {
      std::int64_t s = i + j;
      if (s > n) s -= m;
      if (s < -n) s += m;
      out[static_cast<std::size_t>(s + n)] +=
          a[static_cast<std::size_t>(i + n)] * b[static_cast<std::size_t>(j + n)];
    }
  }
  return out;
}

double DenseGrid::DeltaAt(double eps) const {
  long double total = 0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    const double y = static_cast<double>(lo + static_cast<std::int64_t>(j)) * mesh;
    if (y > eps) total += pmf[j] * -std::expm1(eps - y);
  }
  return static_cast<double>(total);
}

double DenseGrid::Mass() const {
  long double total = 0;
  for (double q : pmf) total += q;
  return static_cast<double>(total);
}

DenseGrid DenseDiscretize(const std::function<double(double)>& cdf, double mesh,
                          double ylo, double yhi) {
  DenseGrid grid;
  grid.mesh = mesh;
  grid.lo = static_cast<std::int64_t>(std::floor(ylo / mesh));
  const auto hi = static_cast<std::int64_t>(std::ceil(yhi / mesh));
  grid.pmf.reserve(static_cast<std::size_t>(hi - grid.lo + 1));
  double below = cdf((static_cast<double>(grid.lo) - 0.5) * mesh);
  for (std::int64_t i = grid.lo; i <= hi; ++i) {
    const double above = cdf((static_cast<double>(i) + 0.5) * mesh);
    grid.pmf.push_back(std::max(0.0, above - below));
    below = above;
  }
  return grid;
}

DenseGrid LinearConvolve(const DenseGrid& a, const DenseGrid& b) {
  if (a.mesh != b.mesh) throw std::invalid_argument("mismatched meshes");
  DenseGrid out;
  out.mesh = a.mesh;
  out.lo = a.lo + b.lo;
  out.pmf.assign(a.pmf.size() + b.pmf.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.pmf.size(); ++i) {
    const double ai = a.pmf[i];
    if (ai == 0) continue;
    for (std::size_t j = 0; j < b.pmf.size(); ++j) {
      out.pmf[i + j] += ai * b.pmf[j];
    }
  }
  return out;
}

DenseGrid LinearSelfCompose(const DenseGrid& p, int folds) {
  if (folds < 1) throw std::invalid_argument("folds must be >= 1");
  DenseGrid out = p;
  for (int i = 1; i < folds; ++i) out = LinearConvolve(out, p);
  return out;
}

}  // namespace oracles
