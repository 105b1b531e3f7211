#ifndef PRVACC_DISCRETIZATION_HPP_
#define PRVACC_DISCRETIZATION_HPP_

#include <cstdint>
#include <functional>
#include <vector>

namespace prvacc {

// A truncated, grid-supported probability mass function. Support points are
// index * mesh + shift for index in [-half_count, half_count], all lying in
// (-truncation, truncation] with truncation = (half_count + 1/2) * mesh.
// Immutable value data; safe to share across threads.
class DiscretePrv {
 public:
  // pmf must have odd size 2n+1 >= 3 (index -n..n), nonnegative entries, and
  // sum to 1 within 1e-12; shift must lie in (-mesh/2, mesh/2].
  DiscretePrv(double mesh, double shift, std::vector<double> pmf);

  double mesh() const { return mesh_; }
  double shift() const { return shift_; }
  std::int64_t half_count() const { return half_count_; }
  std::int64_t size() const { return static_cast<std::int64_t>(pmf_.size()); }
  double truncation() const { return (static_cast<double>(half_count_) + 0.5) * mesh_; }
  const std::vector<double>& pmf() const { return pmf_; }

  // Mass at grid index in [-n, n].
  double MassAt(std::int64_t index) const { return pmf_[static_cast<std::size_t>(index + half_count_)]; }
  double SupportPoint(std::int64_t index) const { return static_cast<double>(index) * mesh_ + shift_; }

  double Mean() const;
  double TotalMass() const;

  // Right-continuous step CDF: sum of masses at support points <= x. An atom
  // lying exactly on a query point is counted, so a re-discretization
  // boundary i*h' + h'/2 assigns such an atom to the lower bucket.
  double Cdf(double x) const;

  // The CDF as a callable, for feeding one stage's output into the next
  // discretization.
  std::function<double(double)> CdfFunction() const;

 private:
  double mesh_;
  double shift_;
  std::int64_t half_count_;
  std::vector<double> pmf_;
  std::vector<double> cumulative_;  // prefix sums of pmf_
};

// Maps a CDF-accessible random variable supported in (-truncation, truncation]
// onto the mesh grid with a mean-preserving shift:
//   q_i = (cdf(i h + h/2) - cdf(i h - h/2)) / normalizer
//   shift = mean - sum_i i h q_i, canonicalized into (-mesh/2, mesh/2].
// `mean` must be the exact mean of the (already truncated) input. Mass that the
// raw CDF places outside the window is removed by the normalization, so
// conditioning a variable to the window amounts to passing its raw CDF plus
// its truncated mean.
// Throws std::invalid_argument for a truncation not of the form
// mesh * (1/2 + positive integer), NumericalError when the captured mass is
// not positive or when the computed shift exceeds mesh/2 + 1e-9.
DiscretePrv Discretize(const std::function<double(double)>& cdf, double mean,
                       double mesh, double truncation);

namespace detail {

// Splits a raw shift into a canonical shift in (-mesh/2, mesh/2] plus an
// integer carry of whole mesh steps: raw = canonical + carry * mesh.
struct CanonicalShift {
  double shift;
  std::int64_t carry;
};
CanonicalShift CanonicalizeShift(double raw_shift, double mesh);

// Cyclic index rotation realizing a carry of whole mesh steps modulo the
// wrap length: the mass at index i moves to index i + carry (mod 2n+1).
void RotateIndices(std::vector<double>& pmf, std::int64_t carry);

}  // namespace detail
}  // namespace prvacc

#endif  // PRVACC_DISCRETIZATION_HPP_
