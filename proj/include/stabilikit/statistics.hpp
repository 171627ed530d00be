#pragma once

/// \file statistics.hpp
/// \brief Error summaries, Pearson correlation with its t-test p-value, and the
/// special functions behind it.

#include <cstddef>
#include <span>

namespace stabilikit {

inline constexpr double kMadToSigma = 1.4826;

struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;     ///< sample (n - 1) standard deviation; 0 for n = 1
  double median = 0.0;  ///< mean of the two middle values for even n
  double rstd = 0.0;    ///< kMadToSigma * median absolute deviation
  std::size_t n = 0;
};

/// Throws EmptyInput for an empty list.
ErrorStats error_stats(std::span<const double> values);

double median(std::span<const double> values);

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;  ///< two-sided
  std::size_t n = 0;        ///< pairs used
  std::size_t dropped = 0;  ///< pairs with a non-finite member
  double mae = 0.0;
  double mae_std = 0.0;
};

/// Sample Pearson correlation of x and y. Non-finite entries mark invalid
/// frames; a pair is used only when both members are finite. Throws
/// LengthMismatch for different lengths, NoValidFrames when no pair remains,
/// InvalidArgument for fewer than three pairs and ZeroVariance when either
/// side is constant.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Regularised incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a correlation coefficient r from n pairs, via
/// t = r sqrt((n - 2) / (1 - r^2)) and Student's t with n - 2 degrees of
/// freedom.
double correlation_p_value(double r, std::size_t n);

}  // namespace stabilikit
