#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stabilikit/error.hpp"
#include "stabilikit/statistics.hpp"

using namespace stabilikit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no exception");
  return ErrorCode::IoError;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TEST_CASE("error_stats examples") {
  const auto a = error_stats(std::vector<double>{5, 5, 5});
  CHECK(a.mean == 5.0);
  CHECK(a.std == 0.0);
  CHECK(a.median == 5.0);
  CHECK(a.rstd == 0.0);

  const auto b = error_stats(std::vector<double>{1, 2, 3, 4, 100});
  CHECK(b.median == 3.0);
  CHECK(b.rstd == doctest::Approx(1.4826).epsilon(1e-12));
  CHECK(b.n == 5);

  const auto c = error_stats(std::vector<double>{3});
  CHECK(c.mean == 3.0);
  CHECK(c.median == 3.0);
  CHECK(c.std == 0.0);
  CHECK(c.rstd == 0.0);

  CHECK(median(std::vector<double>{4, 1, 3, 2}) == 2.5);
  CHECK(code_of([] { error_stats(std::vector<double>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("error_stats matches a two-pass reference") {
  std::mt19937_64 rng(12);
  std::lognormal_distribution<double> d(3.0, 0.7);
  std::vector<double> v(5001);
  for (auto& x : v) x = d(rng);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  const auto s = error_stats(v);
  CHECK(std::abs(s.mean - mean) <= 1e-12 * mean);
  CHECK(std::abs(s.std - sd) <= 1e-12 * sd);
}

TEST_CASE("rstd of Gaussian samples approaches std") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> d(10.0, 4.0);
  std::vector<double> v(10000);
  for (auto& x : v) x = d(rng);
  const auto s = error_stats(v);
  CHECK(std::abs(s.rstd - s.std) < 0.1 * s.std);
}

TEST_CASE("pearson exact linear series") {
  std::vector<double> x(50), y(50), z(50);
  for (int i = 0; i < 50; ++i) {
    x[i] = std::sin(0.3 * i) + 0.01 * i;
    y[i] = 2.5 * x[i] + 7.0;
    z[i] = -x[i] + 3.0;
  }
  const auto same = pearson(x, x);
  CHECK(same.r == 1.0);
  CHECK(same.mae == 0.0);
  CHECK(same.p == 0.0);
  CHECK(pearson(x, y).r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pearson(x, z).r == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("pearson Monte-Carlo against the analytic r") {
  std::mt19937_64 rng(99);
  const double sx = 2.0;
  const double sn = 1.5;
  std::normal_distribution<double> dx(0.0, sx);
  std::normal_distribution<double> dn(0.0, sn);
  std::vector<double> x(1000), y(1000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = dx(rng);
    y[i] = x[i] + dn(rng);
  }
  const double expected = sx / std::sqrt(sx * sx + sn * sn);
  CHECK(std::abs(pearson(x, y).r - expected) < 0.02);
}

TEST_CASE("pearson properties") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> x(40), y(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = d(rng);
    y[i] = 0.5 * x[i] + d(rng);
  }
  const double r = pearson(x, y).r;
  CHECK(pearson(y, x).r == doctest::Approx(r).epsilon(1e-14));
  std::vector<double> ya = y, yn = y;
  for (auto& v : ya) v = 3.0 * v + 11.0;
  for (auto& v : yn) v = -2.0 * v;
  CHECK(pearson(x, ya).r == doctest::Approx(r).epsilon(1e-12));
  CHECK(pearson(x, yn).r == doctest::Approx(-r).epsilon(1e-12));
}

TEST_CASE("pearson pairing and errors") {
  std::vector<double> x{1, 2, kNaN, 4, 5, 6};
  std::vector<double> y{2, 4, 6, kNaN, 10, 12};
  const auto res = pearson(x, y);
  CHECK(res.n == 4);
  CHECK(res.dropped == 2);
  CHECK(res.r == doctest::Approx(1.0));
  CHECK(res.mae == doctest::Approx((1 + 2 + 5 + 6) / 4.0));

  CHECK(code_of([] { pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}); }) ==
        ErrorCode::LengthMismatch);
  CHECK(code_of([] {
          pearson(std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, 2, 3, 4});
        }) == ErrorCode::ZeroVariance);
  CHECK(code_of([] {
          pearson(std::vector<double>{kNaN, kNaN, kNaN}, std::vector<double>{1, 2, 3});
        }) == ErrorCode::NoValidFrames);
  CHECK(code_of([] { pearson(std::vector<double>{1, 2}, std::vector<double>{1, 3}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("p-values against high-precision references") {
  // Regularised incomplete beta evaluated with 50-digit arithmetic.
  CHECK(std::abs(correlation_p_value(0.9, 20) - 6.5742845444972229e-08) < 1e-8);
  CHECK(correlation_p_value(0.9, 20) == doctest::Approx(6.5742845444972229e-08).epsilon(1e-9));
  CHECK(correlation_p_value(0.3, 10) == doctest::Approx(0.39969146875).epsilon(1e-10));
  CHECK(correlation_p_value(-0.5, 30) == doctest::Approx(0.0048999336670680904).epsilon(1e-10));
  CHECK(correlation_p_value(0.05, 1000) == doctest::Approx(0.11407259555107297).epsilon(1e-10));
  CHECK(incomplete_beta(2.5, 1.5, 0.3) == doctest::Approx(0.088943723170665592).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(correlation_p_value(0.0, 10) == doctest::Approx(1.0));
  CHECK(correlation_p_value(1.0, 10) == 0.0);
  CHECK(std::isnan(correlation_p_value(0.5, 2)));
}
