#include "prvacc/convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "prvacc/mechanisms.hpp"
#include "summation.hpp"

namespace prvacc {
namespace {

// FFTW plan creation is not thread safe; execution on distinct buffers is.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

class FftBuffers {
 public:
  explicit FftBuffers(std::int64_t m) : m_(m) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(m_));
    spectrum_ = fftw_alloc_complex(static_cast<std::size_t>(m_ / 2 + 1));
    if (real_ == nullptr || spectrum_ == nullptr) {
      throw std::bad_alloc();
    }
    std::lock_guard<std::mutex> lock(PlannerMutex());
    // FFTW_ESTIMATE plans deterministically (no runtime measurement), which
    // keeps results bit-identical across runs.
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(m_), real_, spectrum_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(m_), spectrum_, real_, FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw NumericalError("fftw failed to build a plan for this grid size");
    }
  }

  ~FftBuffers() {
    {
      std::lock_guard<std::mutex> lock(PlannerMutex());
      if (forward_ != nullptr) fftw_destroy_plan(forward_);
      if (backward_ != nullptr) fftw_destroy_plan(backward_);
    }
    fftw_free(real_);
    fftw_free(spectrum_);
  }

  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  // Loads a pmf stored in natural index order (slot j holds index j - n) in
  // DFT order (slot l holds index l mod m) and transforms it.
  std::vector<std::complex<double>> Spectrum(const DiscretePrv& p) {
    const std::int64_t n = p.half_count();
    const auto& pmf = p.pmf();
    for (std::int64_t l = 0; l < m_; ++l) {
      real_[l] = pmf[static_cast<std::size_t>((l + n) % m_)];
    }
    fftw_execute(forward_);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(m_ / 2 + 1));
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = {spectrum_[j][0], spectrum_[j][1]};
    }
    return out;
  }

  // Inverse transform of a (half) spectrum back to natural index order.
  std::vector<double> Inverse(const std::vector<std::complex<double>>& spec) {
    for (std::size_t j = 0; j < spec.size(); ++j) {
      spectrum_[j][0] = spec[j].real();
      spectrum_[j][1] = spec[j].imag();
    }
    fftw_execute(backward_);
    const std::int64_t n = m_ / 2;
    std::vector<double> pmf(static_cast<std::size_t>(m_));
    const double scale = 1.0 / static_cast<double>(m_);
    for (std::int64_t j = 0; j < m_; ++j) {
      pmf[static_cast<std::size_t>(j)] = real_[(j + n + 1) % m_] * scale;
    }
    return pmf;
  }

 private:
  std::int64_t m_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

void RequireSameGrid(const DiscretePrv& a, const DiscretePrv& b) {
  if (a.mesh() != b.mesh() || a.half_count() != b.half_count()) {
    throw std::invalid_argument("circular convolution requires identical grids");
  }
}

std::complex<double> PowBySquaring(std::complex<double> base, std::uint64_t exponent) {
  std::complex<double> result{1.0, 0.0};
  while (exponent != 0) {
    if ((exponent & 1u) != 0) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

// Clamp tiny negative leakage from the frequency domain, renormalize, and
// reattach the canonicalized shift. `raw_shift` is the sum of operand shifts.
WrappedSum FinishConvolution(std::vector<double> pmf, double mesh,
                             double raw_shift, std::int64_t folds) {
  for (double& q : pmf) {
    if (q < 0) {
      if (q > -1e-12) {
        q = 0;
      } else {
        throw NumericalError(
            "convolution produced a negative mass beyond rounding tolerance");
      }
    }
  }
  const double mass = detail::SumAll(pmf);
  if (std::abs(mass - 1.0) > 1e-8) {
    throw NumericalError(
        "convolution mass deviates from 1 by more than 1e-8; enlarge the grid");
  }
  for (double& q : pmf) q /= mass;
  auto canonical = detail::CanonicalizeShift(raw_shift, mesh);
  detail::RotateIndices(pmf, canonical.carry);
  return WrappedSum{DiscretePrv(mesh, canonical.shift, std::move(pmf)), folds,
                    canonical.carry};
}

}  // namespace

WrappedSum CircularConvolveWrapped(const DiscretePrv& a, const DiscretePrv& b) {
  RequireSameGrid(a, b);
  const std::int64_t m = a.size();
  FftBuffers fft(m);
  auto sa = fft.Spectrum(a);
  const auto sb = fft.Spectrum(b);
  for (std::size_t j = 0; j < sa.size(); ++j) sa[j] *= sb[j];
  return FinishConvolution(fft.Inverse(sa), a.mesh(), a.shift() + b.shift(), 2);
}

WrappedSum SelfConvolvePowerWrapped(const DiscretePrv& p, std::int64_t folds) {
  if (folds < 1) throw std::invalid_argument("folds must be >= 1");
  if (folds == 1) return WrappedSum{p, 1, 0};
  FftBuffers fft(p.size());
  auto spec = fft.Spectrum(p);
  for (auto& z : spec) z = PowBySquaring(z, static_cast<std::uint64_t>(folds));
  return FinishConvolution(fft.Inverse(spec), p.mesh(),
                           static_cast<double>(folds) * p.shift(), folds);
}

WrappedSum MultiConvolveWrapped(const std::vector<const DiscretePrv*>& parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to convolve");
  if (parts.size() == 1) return WrappedSum{*parts.front(), 1, 0};
  for (const DiscretePrv* p : parts) RequireSameGrid(*parts.front(), *p);
  FftBuffers fft(parts.front()->size());
  auto acc = fft.Spectrum(*parts.front());
  double raw_shift = parts.front()->shift();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto spec = fft.Spectrum(*parts[i]);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] *= spec[j];
    raw_shift += parts[i]->shift();
  }
  return FinishConvolution(fft.Inverse(acc), parts.front()->mesh(), raw_shift,
                           static_cast<std::int64_t>(parts.size()));
}

}  // namespace prvacc
