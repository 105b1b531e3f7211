#ifndef PRVACC_CONVOLUTION_HPP_
#define PRVACC_CONVOLUTION_HPP_

#include <cstdint>
#include <vector>

#include "prvacc/discretization.hpp"

namespace prvacc {

// Result of a circular (mod 2L) convolution. The index convolution over
// Z_{2n+1} realizes the value wrap exactly, since (2n+1) * mesh = 2L.
// shift_overflow records the whole-mesh carry absorbed when reducing the
// summed shifts back into (-mesh/2, mesh/2]; it has already been applied to
// the result as a cyclic index rotation.
struct WrappedSum {
  DiscretePrv result;
  std::int64_t folds;
  std::int64_t shift_overflow;
};

// Cyclic convolution of two grids with identical (mesh, half_count).
// Throws std::invalid_argument on mismatched grids, NumericalError when the
// output mass deviates from 1 by more than 1e-8 before renormalization.
WrappedSum CircularConvolveWrapped(const DiscretePrv& a, const DiscretePrv& b);

// folds-fold self-convolution via one forward FFT, a pointwise power by
// squaring, and one inverse FFT; cost O(m log m) independent of folds.
WrappedSum SelfConvolvePowerWrapped(const DiscretePrv& p, std::int64_t folds);

// Convolution of several grids at once (one spectrum product); equals the
// left fold of pairwise convolutions up to rounding.
WrappedSum MultiConvolveWrapped(const std::vector<const DiscretePrv*>& parts);

inline DiscretePrv CircularConvolve(const DiscretePrv& a, const DiscretePrv& b) {
  return CircularConvolveWrapped(a, b).result;
}

inline DiscretePrv SelfConvolvePower(const DiscretePrv& p, std::int64_t folds) {
  return SelfConvolvePowerWrapped(p, folds).result;
}

}  // namespace prvacc

#endif  // PRVACC_CONVOLUTION_HPP_
