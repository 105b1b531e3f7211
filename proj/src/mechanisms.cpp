#include "prvacc/mechanisms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace prvacc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double NormCdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2); }
double NormSf(double z) { return 0.5 * std::erfc(z * std::numbers::sqrt2 / 2); }
double NormPdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
}
double LogNormPdf(double z) {
  return -0.5 * z * z - 0.5 * std::log(2 * std::numbers::pi);
}

// log of the upper normal tail; asymptotic expansion once erfc underflows.
double LogNormSf(double z) {
  const double sf = NormSf(z);
  if (sf > 0) return std::log(sf);
  return -0.5 * z * z - std::log(z) - 0.5 * std::log(2 * std::numbers::pi) +
         std::log1p(-1 / (z * z) + 3 / (z * z * z * z));
}

// Pr[N(1, sigma^2) > w] - e^{(2w-1)/(2 sigma^2)} Pr[N(0, sigma^2) > w]:
// the hockey-stick mass of a unit-shifted Gaussian pair above threshold w.
double GaussianHockeyStickAboveThreshold(double w, double sigma) {
  const double first = NormSf((w - 1) / sigma);
  if (first == 0) return 0;
  const double s = (2 * w - 1) / (2 * sigma * sigma);
  const double exponent = s + LogNormSf(w / sigma);
  const double second = exponent < -745 ? 0 : std::exp(exponent);
  return std::max(0.0, first - second);
}

using GaussKronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

// Adaptive quadrature over consecutive segments; verifies the achieved error
// estimate and reports it on failure.
template <typename F>
double IntegrateSegments(const F& f, std::vector<double> edges,
                         double rel_tolerance = 1e-11,
                         double abs_tolerance = 1e-15) {
  std::sort(edges.begin(), edges.end());
  const double local_tolerance = std::max(1e-14, rel_tolerance / 30);
  double total = 0, error = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    double err = 0;
    total += GaussKronrod::integrate(f, edges[i], edges[i + 1], 15,
                                     local_tolerance, &err);
    error += err;
  }
  if (error > std::max(abs_tolerance, rel_tolerance * std::abs(total))) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "quadrature did not converge (achieved %.3e, value %.3e)",
                  error, total);
    throw NumericalError(msg);
  }
  return total;
}

class LaplacePrv final : public Prv {
 public:
  explicit LaplacePrv(double scale) : edge_(1.0 / scale) {}

  // Atoms of mass 1/2 at +1/b and e^{-1/b}/2 at -1/b; density
  // (1/4) e^{(y - 1/b)/2} in between.
  double Cdf(double y) const override {
    if (y < -edge_) return 0;
    if (y >= edge_) return 1;
    return 0.5 * std::exp((y - edge_) / 2);
  }

  double Mean() const override { return edge_ + std::expm1(-edge_); }

  double TruncatedMean(double radius) const override {
    if (radius >= edge_) return Mean();
    const double mass = Cdf(radius) - Cdf(-radius);
    if (!(mass > 0)) throw NumericalError("no mass inside truncation radius");
    const double scale = 0.25 * std::exp(-edge_ / 2);
    const double upper = (2 * radius - 4) * std::exp(radius / 2);
    const double lower = -(2 * radius + 4) * std::exp(-radius / 2);
    return scale * (upper - lower) / mass;
  }

  SupportBounds Support() const override { return {-edge_, edge_}; }

  double Delta(double epsilon) const override {
    if (epsilon >= edge_) return 0;
    if (epsilon <= -edge_) return -std::expm1(epsilon);
    return -std::expm1((epsilon - edge_) / 2);
  }

  double LogMgf(double lambda) const override {
    const double decay = std::exp(-(2 * lambda + 1) * edge_);
    const double bracket = 0.5 + 0.5 * decay + (1 - decay) / (2 * (2 * lambda + 1));
    return lambda * edge_ + std::log(bracket);
  }

 private:
  double edge_;  // 1/b, the a.s. bound on |Y|
};

class GaussianPrv final : public Prv {
 public:
  explicit GaussianPrv(double sigma)
      : sigma_(sigma), mean_(0.5 / (sigma * sigma)), sd_(1.0 / sigma) {}

  double Cdf(double y) const override { return NormCdf((y - mean_) / sd_); }

  double Mean() const override { return mean_; }

  double TruncatedMean(double radius) const override {
    const double a = (-radius - mean_) / sd_;
    const double b = (radius - mean_) / sd_;
    const double mass = NormCdf(b) - NormCdf(a);
    if (!(mass > 0)) throw NumericalError("no mass inside truncation radius");
    return mean_ - sd_ * (NormPdf(b) - NormPdf(a)) / mass;
  }

  SupportBounds Support() const override { return {-kInf, kInf}; }

  double Delta(double epsilon) const override {
    const double threshold = 0.5 + sigma_ * sigma_ * epsilon;
    return std::min(1.0, GaussianHockeyStickAboveThreshold(threshold, sigma_));
  }

  double LogMgf(double lambda) const override {
    return lambda * (lambda + 1) * 0.5 / (sigma_ * sigma_);
  }

 private:
  double sigma_;
  double mean_;  // 1/(2 sigma^2)
  double sd_;    // 1/sigma
};

// Loss of the pair (N(0, sigma^2), (1-g) N(0, sigma^2) + g N(1, sigma^2)).
// The remove direction draws from the mixture and the loss is ell(w); the
// add direction swaps the pair, drawing w from the plain Gaussian with loss
// -ell(w). ell is strictly increasing with a closed-form inverse.
class SubsampledGaussianPrv final : public Prv {
 public:
  SubsampledGaussianPrv(double sigma, double gamma, Adjacency direction)
      : sigma_(sigma),
        gamma_(gamma),
        direction_(direction),
        log_keep_(std::log1p(-gamma)),  // log(1-gamma); -inf when gamma = 1
        mean_(std::numeric_limits<double>::quiet_NaN()) {
    mean_ = IntegrateLoss(-kInf, kInf) * (direction_ == Adjacency::kRemove ? 1 : -1);
  }

  double Cdf(double y) const override {
    if (direction_ == Adjacency::kRemove) {
      if (y <= log_keep_) return 0;
      const double w = LossInverse(y);
      return (1 - gamma_) * NormCdf(w / sigma_) + gamma_ * NormCdf((w - 1) / sigma_);
    }
    if (y >= -log_keep_) return 1;
    return NormCdf(-LossInverse(-y) / sigma_);
  }

  double Mean() const override { return mean_; }

  double TruncatedMean(double radius) const override {
    const double mass = Cdf(radius) - Cdf(-radius);
    if (!(mass > 0)) throw NumericalError("no mass inside truncation radius");
    // Either direction conditions w to the same interval ell(w) in [-R, R].
    const double wlo = -radius <= log_keep_ ? -kInf : LossInverse(-radius);
    const double whi = LossInverse(radius);
    const double sign = direction_ == Adjacency::kRemove ? 1.0 : -1.0;
    return sign * IntegrateLoss(wlo, whi) / mass;
  }

  SupportBounds Support() const override {
    if (direction_ == Adjacency::kRemove) return {log_keep_, kInf};
    return {-kInf, -log_keep_};
  }

  double Delta(double epsilon) const override {
    if (direction_ == Adjacency::kRemove) {
      if (epsilon <= log_keep_) return -std::expm1(epsilon);
      return std::min(
          1.0, gamma_ * GaussianHockeyStickAboveThreshold(LossInverse(epsilon), sigma_));
    }
    if (epsilon >= -log_keep_) return 0;
    const double w = LossInverse(-epsilon);
    const double value = -std::expm1(epsilon + log_keep_) * NormCdf(w / sigma_) -
                         std::exp(epsilon) * gamma_ * NormCdf((w - 1) / sigma_);
    return std::min(1.0, std::max(0.0, value));
  }

  double LogMgf(double lambda) const override {
    if (lambda == 0) return 0;
    if (direction_ == Adjacency::kRemove) {
      // E over the mixture of e^{lambda ell}.
      const double a0 = LogTiltedMoment(0.0, lambda);
      const double a1 = LogTiltedMoment(1.0, lambda);
      if (gamma_ == 1) return a1;
      return LogSumExp(std::log1p(-gamma_) + a0, std::log(gamma_) + a1);
    }
    // -lambda ell(w) - w^2/(2 sigma^2) is concave in w (ell is convex), with
    // its maximum in [-lambda - 40 sigma, 0].
    const auto exponent = [&](double w) {
      return -lambda * Loss(w) + LogNormPdf(w / sigma_) - std::log(sigma_);
    };
    return LogConcaveIntegral(exponent, -lambda - 40 * sigma_, 40 * sigma_);
  }

 private:
  double Shifted(double w) const { return (2 * w - 1) / (2 * sigma_ * sigma_); }

  // ell(w) = log((1-gamma) + gamma e^{s(w)}); equals s itself when the whole
  // population is sampled.
  double Loss(double w) const {
    const double s = Shifted(w);
    if (gamma_ == 1) return s;
    if (s > 30) return s + std::log(gamma_ + (1 - gamma_) * std::exp(-s));
    return std::log1p(gamma_ * std::expm1(s));
  }

  // ell(w) - s(w) = log(gamma + (1-gamma) e^{-s(w)}), stable for large s.
  double LossMinusShift(double w) const {
    const double s = Shifted(w);
    if (s > 30) return std::log(gamma_ + (1 - gamma_) * std::exp(-s));
    return std::log1p(gamma_ * std::expm1(s)) - s;
  }

  // Inverse of ell: w(y) = 1/2 + sigma^2 log((e^y - (1-gamma)) / gamma).
  double LossInverse(double y) const {
    if (y > 500) return 0.5 + sigma_ * sigma_ * (y - std::log(gamma_));
    const double numer = gamma_ + std::expm1(y);
    if (!(numer > 0)) return -kInf;
    return 0.5 + sigma_ * sigma_ * (std::log(numer) - std::log(gamma_));
  }

  // integral of ell(w) q(w) dw over [wlo, whi] under the draw distribution.
  double IntegrateLoss(double wlo, double whi) const {
    const auto density = [&](double w) {
      if (direction_ == Adjacency::kRemove) {
        return ((1 - gamma_) * NormPdf(w / sigma_) +
                gamma_ * NormPdf((w - 1) / sigma_)) /
               sigma_;
      }
      return NormPdf(w / sigma_) / sigma_;
    };
    const auto f = [&](double w) {
      const double d = density(w);
      return d == 0 ? 0.0 : Loss(w) * d;  // the loss may be -inf where d = 0
    };
    const double lo = std::max(wlo, -40 * sigma_);
    const double hi = std::min(whi, 1 + 40 * sigma_);
    std::vector<double> edges{lo, hi};
    for (double split : {0.0, 0.5, 1.0}) {
      if (split > lo && split < hi) edges.push_back(split);
    }
    return IntegrateSegments(f, std::move(edges));
  }

  // log E_{N(c, sigma^2)}[e^{lambda ell(w)}]. Split at s(w) = 0, where
  // ell(1/2) = 0. On the left branch e^{lambda ell} <= 1, so the raw
  // integrand is bounded by the normal density. On the right, tilting by
  // e^{lambda s} recenters the normal at c + lambda:
  //   e^{lambda ell} N(c,.) = e^{tilt} e^{lambda (ell - s)} N(c + lambda,.),
  // whose log-integrand is concave; it is integrated around its peak.
  double LogTiltedMoment(double c, double lambda) const {
    const auto left = [&](double w) {
      return std::exp(lambda * Loss(w)) * NormPdf((w - c) / sigma_) / sigma_;
    };
    std::vector<double> left_edges{std::min(c - 40 * sigma_, 0.5), 0.5};
    if (c < 0.5) left_edges.push_back(c);
    // for large lambda the left integrand concentrates just below s = 0
    for (double back : {sigma_ / (1 + lambda), sigma_}) {
      if (0.5 - back > left_edges.front()) left_edges.push_back(0.5 - back);
    }
    const double i1 = IntegrateSegments(left, std::move(left_edges), 3e-8);

    const double tilt = lambda * (2 * c + lambda - 1) / (2 * sigma_ * sigma_);
    const auto right_exponent = [&](double w) {
      return lambda * LossMinusShift(w) + LogNormPdf((w - c - lambda) / sigma_) -
             std::log(sigma_);
    };
    const double log_i2 =
        LogConcaveIntegral(right_exponent, 0.5, c + lambda + 40 * sigma_);
    return LogSumExp(i1 > 0 ? std::log(i1) : -kInf, tilt + log_i2);
  }

  // log of the integral of e^{exponent(w)} over [lo, hi] for a concave
  // exponent: ternary-search the peak, factor it out, integrate the rest.
  template <typename F>
  double LogConcaveIntegral(const F& exponent, double lo, double hi) const {
    double a = lo, b = hi;
    while (b - a > 1e-8 * std::max(sigma_, b - lo)) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (exponent(m1) < exponent(m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    const double peak_at = 0.5 * (a + b);
    const double peak = exponent(peak_at);
    if (!std::isfinite(peak)) return -kInf;
    const auto f = [&](double w) { return std::exp(exponent(w) - peak); };
    // segment around the peak at its own curvature scale, so the adaptive
    // depth is spent inside the spike rather than locating it
    const double probe = sigma_ / 16;
    const double curvature =
        std::max(1e-12, -(exponent(peak_at + probe) - 2 * peak +
                          exponent(peak_at - probe)) /
                            (probe * probe));
    const double width = 1.0 / std::sqrt(curvature);
    std::vector<double> edges{lo, hi};
    for (double split :
         {peak_at - 64 * width, peak_at - 8 * width, peak_at - width, peak_at,
          peak_at + width, peak_at + 8 * width, peak_at + 64 * width}) {
      if (split > lo && split < hi) edges.push_back(split);
    }
    const double body = IntegrateSegments(f, std::move(edges), 3e-8);
    return body > 0 ? peak + std::log(body) : -kInf;
  }

  static double LogSumExp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  }

  double sigma_;
  double gamma_;
  Adjacency direction_;
  double log_keep_;
  double mean_;
};

}  // namespace

std::string ToString(Adjacency direction) {
  return direction == Adjacency::kRemove ? "remove" : "add";
}

Adjacency AdjacencyFromString(const std::string& name) {
  if (name == "remove") return Adjacency::kRemove;
  if (name == "add") return Adjacency::kAdd;
  throw std::invalid_argument("unknown adjacency direction: " + name);
}

std::string Describe(const MechanismSpec& spec) {
  char buf[128];
  if (const auto* laplace = std::get_if<LaplaceSpec>(&spec)) {
    std::snprintf(buf, sizeof(buf), "laplace scale=%g", laplace->scale);
  } else if (const auto* gaussian = std::get_if<GaussianSpec>(&spec)) {
    std::snprintf(buf, sizeof(buf), "gaussian sigma=%g", gaussian->sigma);
  } else {
    const auto& sub = std::get<SubsampledGaussianSpec>(spec);
    std::snprintf(buf, sizeof(buf),
                  "subsampled-gaussian sigma=%g gamma=%g direction=%s",
                  sub.sigma, sub.sampling_prob, ToString(sub.direction).c_str());
  }
  return buf;
}

std::unique_ptr<Prv> BuildPrv(const MechanismSpec& spec) {
  if (const auto* laplace = std::get_if<LaplaceSpec>(&spec)) {
    if (!(laplace->scale > 0)) {
      throw std::invalid_argument("laplace scale must be positive");
    }
    return std::make_unique<LaplacePrv>(laplace->scale);
  }
  if (const auto* gaussian = std::get_if<GaussianSpec>(&spec)) {
    if (!(gaussian->sigma > 0)) {
      throw std::invalid_argument("gaussian sigma must be positive");
    }
    return std::make_unique<GaussianPrv>(gaussian->sigma);
  }
  const auto& sub = std::get<SubsampledGaussianSpec>(spec);
  if (!(sub.sigma > 0)) {
    throw std::invalid_argument("subsampled gaussian sigma must be positive");
  }
  if (!(sub.sampling_prob > 0) || sub.sampling_prob > 1) {
    throw std::invalid_argument("sampling probability must lie in (0, 1]");
  }
  return std::make_unique<SubsampledGaussianPrv>(sub.sigma, sub.sampling_prob,
                                                 sub.direction);
}

double ChernoffEpsBound(const std::function<double(double)>& total_log_mgf,
                        double delta, double support_cap) {
  if (!(delta > 0) || !(delta < 1)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  const double log_inv_delta = -std::log(delta);
  const auto objective = [&](double lambda) {
    double value;
    try {
      value = total_log_mgf(lambda);
    } catch (const std::exception&) {
      return kInf;
    }
    if (!std::isfinite(value)) return kInf;
    return (value + log_inv_delta) / lambda;
  };

  // Geometric grid, then golden-section refinement around the best cell.
  double best = kInf, best_u = 0;
  bool found = false;
  for (int u = -14; u <= 28; ++u) {  // lambda = 2^u
    const double value = objective(std::exp2(static_cast<double>(u)));
    if (value < best) {
      best = value;
      best_u = u;
      found = true;
    }
  }
  if (!found) {
    throw NumericalError(
        "mgf not evaluable on the probed range; supply explicit truncation "
        "overrides");
  }
  constexpr double kGolden = 0.6180339887498949;
  double lo = best_u - 1.0, hi = best_u + 1.0;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = objective(std::exp2(x1)), f2 = objective(std::exp2(x2));
  for (int iter = 0; iter < 60 && hi - lo > 1e-7; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = objective(std::exp2(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = objective(std::exp2(x2));
    }
  }
  best = std::min(best, std::min(f1, f2));
  return std::min(best, support_cap);
}

double EpsUpperBound(const Prv& prv, std::int64_t folds, double delta) {
  if (folds < 1) throw std::invalid_argument("folds must be >= 1");
  const double cap = prv.Support().hi == kInf
                         ? kInf
                         : static_cast<double>(folds) * prv.Support().hi;
  return ChernoffEpsBound(
      [&](double lambda) {
        return static_cast<double>(folds) * prv.LogMgf(lambda);
      },
      delta, cap);
}

double GroupEpsUpperBound(const std::vector<const Prv*>& prvs, double delta) {
  if (prvs.empty()) throw std::invalid_argument("empty group");
  double cap = 0;
  for (const Prv* prv : prvs) {
    cap += prv->Support().hi;  // becomes inf if any member is unbounded
  }
  return ChernoffEpsBound(
      [&](double lambda) {
        double total = 0;
        for (const Prv* prv : prvs) total += prv->LogMgf(lambda);
        return total;
      },
      delta, cap);
}

}  // namespace prvacc
