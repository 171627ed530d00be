#include "stabilikit/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

void check_design(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "filter order must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample rate must be > 0");
  if (!(cutoff_hz > 0.0 && cutoff_hz < 0.5 * sample_rate_hz)) {
    throw Error(ErrorCode::InvalidArgument, "cutoff must lie in (0, sample_rate / 2)");
  }
}

// DC gain of every section is one, so a constant input u leaves each section
// in the state below.
void steady_state(const Biquad& s, double u, double& z1, double& z2) {
  z2 = (s.b2 - s.a2) * u;
  z1 = (s.b1 - s.a1) * u + z2;
}

std::vector<double> run(const std::vector<Biquad>& sections, std::vector<double> x,
                        bool from_steady_state) {
  if (x.empty()) return x;
  for (const auto& s : sections) {
    double z1 = 0.0;
    double z2 = 0.0;
    if (from_steady_state) steady_state(s, x.front(), z1, z2);
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return x;
}

}  // namespace

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz)
    : ButterworthLowpass((check_design(order, cutoff_hz, sample_rate_hz), order), sample_rate_hz,
                         Warped{std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz)}) {}

ButterworthLowpass ButterworthLowpass::for_zero_phase(int order, double cutoff_hz,
                                                      double sample_rate_hz) {
  check_design(order, cutoff_hz, sample_rate_hz);
  // Two passes square the magnitude; move the single-pass corner so that the
  // squared response is 1/sqrt(2) at the requested cutoff.
  const double correction = std::pow(std::numbers::sqrt2 - 1.0, 1.0 / (2.0 * order));
  return ButterworthLowpass(order, sample_rate_hz,
                            Warped{std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz) / correction});
}

ButterworthLowpass::ButterworthLowpass(int order, double sample_rate, Warped warped)
    : order_(order), sample_rate_(sample_rate) {
  const double K = warped.k;
  const double K2 = K * K;
  for (int k = 0; k < order / 2; ++k) {
    const double a = 2.0 * std::sin(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order));
    const double a0 = 1.0 + a * K + K2;
    Biquad s;
    s.b0 = K2 / a0;
    s.b1 = 2.0 * K2 / a0;
    s.b2 = K2 / a0;
    s.a1 = (2.0 * K2 - 2.0) / a0;
    s.a2 = (1.0 - a * K + K2) / a0;
    sections_.push_back(s);
  }
  if (order % 2 == 1) {
    Biquad s;
    s.b0 = K / (1.0 + K);
    s.b1 = s.b0;
    s.a1 = (K - 1.0) / (K + 1.0);
    sections_.push_back(s);
  }
}

std::vector<double> ButterworthLowpass::filter(std::span<const double> x) const {
  return run(sections_, std::vector<double>(x.begin(), x.end()), false);
}

std::vector<double> ButterworthLowpass::filtfilt(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n < 2) return {x.begin(), x.end()};
  const std::size_t pad = std::min(padding(), n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  std::vector<double> y = run(sections_, std::move(ext), true);
  std::reverse(y.begin(), y.end());
  y = run(sections_, std::move(y), true);
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad),
          y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::complex<double> ButterworthLowpass::response(double freq_hz) const {
  const std::complex<double> zinv =
      std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate_);
  std::complex<double> h = 1.0;
  for (const auto& s : sections_) {
    h *= (s.b0 + s.b1 * zinv + s.b2 * zinv * zinv) / (1.0 + s.a1 * zinv + s.a2 * zinv * zinv);
  }
  return h;
}

std::size_t ButterworthLowpass::settling_samples(double rel_tol) const {
  constexpr std::size_t kHorizon = 1 << 16;
  std::vector<double> impulse(kHorizon, 0.0);
  impulse.front() = 1.0;
  const std::vector<double> h = filter(impulse);
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  std::size_t last = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (std::abs(h[i]) > rel_tol * peak) last = i;
  }
  return last + 1;
}

}  // namespace stabilikit
