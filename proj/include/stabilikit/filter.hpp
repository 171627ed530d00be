#pragma once

/// \file filter.hpp
/// \brief Butterworth low-pass as cascaded second-order sections, with a
/// forward-backward (zero-phase) driver.

#include <complex>
#include <span>
#include <vector>

namespace stabilikit {

/// Direct-form-II-transposed section, a0 normalised to 1. First-order
/// sections have b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

class ButterworthLowpass {
 public:
  /// Digital Butterworth of the given order via the bilinear transform; the
  /// -3 dB point of a single pass is at cutoff_hz.
  ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz);

  /// Same family, but the cutoff is corrected so that the forward-backward
  /// cascade (effective order 2 * order) is -3 dB at cutoff_hz.
  static ButterworthLowpass for_zero_phase(int order, double cutoff_hz, double sample_rate_hz);

  int order() const noexcept { return order_; }
  double sample_rate() const noexcept { return sample_rate_; }
  const std::vector<Biquad>& sections() const noexcept { return sections_; }

  /// Single causal pass from rest.
  std::vector<double> filter(std::span<const double> x) const;

  /// Forward then backward pass with odd-reflection padding and steady-state
  /// initial conditions. Output length equals input length. Inputs shorter
  /// than two samples are returned unchanged.
  std::vector<double> filtfilt(std::span<const double> x) const;

  /// Complex frequency response of one pass.
  std::complex<double> response(double freq_hz) const;

  /// Samples after which the single-pass impulse response stays below
  /// rel_tol of its peak magnitude.
  std::size_t settling_samples(double rel_tol = 1e-3) const;

  std::size_t padding() const noexcept { return 3 * (2 * sections_.size() + 1); }

 private:
  struct Warped {
    double k;
  };
  ButterworthLowpass(int order, double sample_rate, Warped warped);

  int order_;
  double sample_rate_;
  std::vector<Biquad> sections_;
};

}  // namespace stabilikit
