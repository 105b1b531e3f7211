#ifndef PRVACC_SRC_SUMMATION_HPP_
#define PRVACC_SRC_SUMMATION_HPP_

#include <cmath>
#include <vector>

namespace prvacc::detail {

// Neumaier compensated summation; keeps mass and mean bookkeeping accurate to
// a few ulps even for multi-million-bucket grids.
class CompensatedSum {
 public:
  void Add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double Result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double SumAll(const std::vector<double>& values) {
  CompensatedSum acc;
  for (double v : values) acc.Add(v);
  return acc.Result();
}

}  // namespace prvacc::detail

#endif  // PRVACC_SRC_SUMMATION_HPP_
