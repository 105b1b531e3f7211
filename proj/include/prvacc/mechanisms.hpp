#ifndef PRVACC_MECHANISMS_HPP_
#define PRVACC_MECHANISMS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>

namespace prvacc {

// Raised when a computation fails numerically (as opposed to being called
// with invalid arguments, which raises std::invalid_argument).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which distribution of the dominating pair plays the numerator for the
// subsampled mechanism. Remove: the plain Gaussian is the reference and the
// mixture is the numerator; Add swaps the two.
enum class Adjacency { kRemove, kAdd };

// All mechanisms use sensitivity 1; rescale the noise parameter for other
// sensitivities.
struct LaplaceSpec {
  double scale = 1.0;  // b > 0
};

struct GaussianSpec {
  double sigma = 1.0;  // sigma > 0
};

struct SubsampledGaussianSpec {
  double sigma = 1.0;          // sigma > 0
  double sampling_prob = 1.0;  // gamma in (0, 1]
  Adjacency direction = Adjacency::kRemove;
};

using MechanismSpec = std::variant<LaplaceSpec, GaussianSpec, SubsampledGaussianSpec>;

// Short human/CSV-friendly descriptor, e.g. "gaussian sigma=2". Contains no
// commas so it can live in a CSV column.
std::string Describe(const MechanismSpec& spec);

std::string ToString(Adjacency direction);
Adjacency AdjacencyFromString(const std::string& name);

// Analytic support bounds of the loss variable; may be +-infinity.
struct SupportBounds {
  double lo;
  double hi;
};

// View of the privacy loss random variable Y of a mechanism. Immutable after
// construction; every method is a pure function and safe to call from many
// threads at once.
class Prv {
 public:
  virtual ~Prv() = default;

  // Right-continuous CDF of Y, with limits 0 and 1 at the support bounds.
  virtual double Cdf(double y) const = 0;

  // E[Y]; nonnegative for a genuine loss variable.
  virtual double Mean() const = 0;

  // E[Y | |Y| <= radius].
  virtual double TruncatedMean(double radius) const = 0;

  virtual SupportBounds Support() const = 0;

  // delta_Y(epsilon) = E[(1 - e^{epsilon - Y})_+], defined for every real
  // epsilon, not just nonnegative ones.
  virtual double Delta(double epsilon) const = 0;

  // log E[e^{lambda Y}] for lambda >= 0.
  virtual double LogMgf(double lambda) const = 0;
};

// Builds the analytic loss variable of a mechanism.
// Throws std::invalid_argument if the spec violates its parameter ranges.
std::unique_ptr<Prv> BuildPrv(const MechanismSpec& spec);

// Upper bound on eps_{Y^{(+) folds}}(delta) from the moment generating
// function: min over lambda > 0 of (folds * log mgf(lambda) + log(1/delta)) /
// lambda, minimized over a geometric lambda grid refined by golden-section
// search. When the support of Y is bounded above, the trivial cap
// folds * sup Y is applied as well.
// Throws NumericalError when the mgf cannot be evaluated anywhere.
double EpsUpperBound(const Prv& prv, std::int64_t folds, double delta);

// Same bound for a sum of independent, possibly different, loss variables:
// the exponent is the sum of the individual log-mgfs.
double GroupEpsUpperBound(const std::vector<const Prv*>& prvs, double delta);

// Chernoff machinery shared by the two entry points above. `total_log_mgf`
// must be the log-mgf of the full (already composed) variable.
double ChernoffEpsBound(const std::function<double(double)>& total_log_mgf,
                        double delta, double support_cap);

}  // namespace prvacc

#endif  // PRVACC_MECHANISMS_HPP_
