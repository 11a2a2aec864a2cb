#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "satolab/chebyshev.hpp"
#include "satolab/error.hpp"
#include "satolab/measures.hpp"
#include "satolab/selberg.hpp"

using namespace satolab;
using measures::LocalMeasure;
using measures::SatoTateMeasure;

namespace {

// Closed-form CDF of the local measure, from integrating the density ratio
// term by term and summing the geometric series of sines.
double local_cdf_closed(double q, double theta) {
  return (theta - 0.5 * (q - 1.0) * std::atan(std::sin(2 * theta) / (q - std::cos(2 * theta)))) / kPi;
}

double density_quadrature_moment(const LocalMeasure& mu, int m) {
  return simpson([&](double t) { return mu.density(t) * chebyshev::eval_u(m, t); }, 0.0, kPi, 1 << 14);
}

}  // namespace

TEST_SUITE("measures") {
  TEST_CASE("density examples") {
    const SatoTateMeasure st;
    CHECK(st.density(kPi / 2) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
    CHECK(LocalMeasure(2.0).density(0.0) == 0.0);
    const LocalMeasure big(1e6);
    // |ratio - 1| <= sum_{n>=1} (2n+1) q^-n, attained at theta = 0: about 3/q.
    const double r = 1e-6;
    const double bound = (1.0 + r) / ((1.0 - r) * (1.0 - r)) - 1.0;
    for (double t = 0.05; t < kPi; t += 0.1) {
      CHECK(std::abs(big.density(t) / st.density(t) - 1.0) <= bound);
    }
    CHECK(std::abs(big.density_ratio(0.0) - 1.0) == doctest::Approx(bound).epsilon(1e-9));
    CHECK_THROWS_AS(LocalMeasure(1.5), ConfigError);
    CHECK_THROWS_AS(LocalMeasure{INFINITY}, ConfigError);
    CHECK_THROWS_AS(st.density(-0.01), std::domain_error);
  }

  TEST_CASE("normalization") {
    for (double q : {2.0, 3.0, 4.0, 5.0, 25.0, 1e6}) {
      const LocalMeasure mu(q);
      const double total = simpson([&](double t) { return mu.density(t); }, 0.0, kPi, 1 << 14);
      CHECK(std::abs(total - 1.0) <= 1e-10);
    }
  }

  TEST_CASE("Chebyshev moments") {
    CHECK(measures::chebyshev_moment(4.0, 2) == 0.25);
    CHECK(measures::chebyshev_moment(7.0, 3) == 0.0);
    CHECK(measures::chebyshev_moment(5.0, 0) == 1.0);
    for (double q : {2.0, 3.0, 4.0, 5.0, 25.0}) {
      const LocalMeasure mu(q);
      for (int m = 0; m <= 20; ++m) {
        const double expect = m % 2 == 0 ? std::pow(q, -m / 2.0) : 0.0;
        CHECK(mu.chebyshev_moment(m) == doctest::Approx(expect).epsilon(1e-15));
        CHECK(std::abs(density_quadrature_moment(mu, m) - expect) <= 1e-9);
      }
    }
  }

  TEST_CASE("density ratio generating function") {
    for (double q : {2.0, 3.0, 9.0}) {
      const LocalMeasure mu(q);
      for (int N : {2, 5, 10}) {
        const double bound = (2.0 * N + 3.0) * std::pow(q, -(N + 1.0)) / std::pow(1.0 - 1.0 / q, 2);
        for (int i = 0; i <= 400; ++i) {
          const double theta = kPi * i / 400.0;
          double partial = 0.0;
          for (int n = 0; n <= N; ++n) partial += chebyshev::eval_u(2 * n, theta) * std::pow(q, -n);
          CHECK(std::abs(partial - mu.density_ratio(theta)) <= bound);
        }
      }
    }
  }

  TEST_CASE("CDF values") {
    const SatoTateMeasure st;
    CHECK(st.cdf(kPi / 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(st.cdf(kPi / 4) == doctest::Approx(0.25 - 1.0 / (2.0 * kPi)).epsilon(1e-14));
    CHECK(std::abs(LocalMeasure(2.0).cdf(kPi) - 1.0) <= 1e-12);
    for (double q : {2.0, 3.0, 4.0, 25.0, 1e6}) {
      const LocalMeasure mu(q);
      double prev = -1.0;
      for (int i = 0; i <= 1000; ++i) {
        const double theta = kPi * i / 1000.0;
        const double c = mu.cdf(theta);
        CHECK(std::abs(c - local_cdf_closed(q, theta)) <= 1e-12);
        CHECK(c >= prev);
        prev = c;
      }
    }
  }

  TEST_CASE("interval mass") {
    CHECK(std::abs(LocalMeasure(3.0).interval_mass(ArcInterval(0.0, kPi)) - 1.0) <= 1e-12);
    CHECK(std::abs(LocalMeasure(2.0).interval_mass(ArcInterval(0.0, kPi / 2)) - 0.5) <= 1e-12);
    const ArcInterval I(kPi / 4, kPi / 2);
    CHECK(std::abs(LocalMeasure(1e6).interval_mass(I) - selberg::mu_infty_interval(I)) <= 1e-5);
    CHECK(std::abs(SatoTateMeasure().interval_mass(I) - selberg::mu_infty_interval(I)) <= 1e-15);
  }

  TEST_CASE("distance to Sato-Tate is O(1/q)") {
    const ArcInterval I(0.4, 1.3);
    const double mu = selberg::mu_infty_interval(I);
    for (double q : {2.0, 5.0, 49.0, 1e3, 1e5}) {
      CHECK(std::abs(LocalMeasure(q).interval_mass(I) - mu) * q <= 10.0);
    }
  }

  TEST_CASE("quantile inverts the CDF") {
    const SatoTateMeasure st;
    CHECK(st.quantile(0.5) == doctest::Approx(kPi / 2).epsilon(1e-12));
    for (double q : {2.0, 4.0, 1e6}) {
      const LocalMeasure mu(q);
      for (double u : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999999, 1.0 - 1e-12}) {
        const double theta = mu.quantile(u);
        CHECK(theta >= 0.0);
        CHECK(theta <= kPi);
        CHECK(std::abs(mu.cdf(theta) - u) <= 1e-12);
      }
    }
    CHECK_THROWS_AS(st.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(st.quantile(1.0), std::domain_error);
  }

  TEST_CASE("sampling: chi-square goodness of fit") {
    constexpr int kBins = 50;
    constexpr int kSamples = 1000000;
    for (double q : {3.0, 25.0}) {
      const LocalMeasure mu(q);
      RngStream rng(0xfeedULL + static_cast<std::uint64_t>(q));
      std::vector<double> counts(kBins, 0.0);
      for (int i = 0; i < kSamples; ++i) {
        const int b = std::min(kBins - 1, static_cast<int>(mu.sample(rng) / kPi * kBins));
        counts[b] += 1.0;
      }
      double chi2 = 0.0;
      for (int b = 0; b < kBins; ++b) {
        const double p = mu.cdf(kPi * (b + 1) / kBins) - mu.cdf(kPi * b / kBins);
        const double expect = p * kSamples;
        chi2 += (counts[b] - expect) * (counts[b] - expect) / expect;
      }
      const boost::math::chi_squared dist(kBins - 1);
      CHECK(chi2 <= boost::math::quantile(boost::math::complement(dist, 1e-3)));
    }
  }

  TEST_CASE("sampling: U_2 mean and Sato-Tate interval mass") {
    constexpr int kSamples = 1000000;
    const LocalMeasure mu(3.0);
    RngStream rng(99);
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < kSamples; ++i) {
      const double u2 = chebyshev::eval_u(2, mu.sample(rng));
      s += u2;
      s2 += u2 * u2;
    }
    const double mean = s / kSamples;
    const double se = std::sqrt((s2 / kSamples - mean * mean) / kSamples);
    CHECK(std::abs(mean - 1.0 / 3.0) <= 4.0 * se);

    const SatoTateMeasure st;
    const ArcInterval I(kPi / 4, kPi / 2);
    const double p = selberg::mu_infty_interval(I);
    RngStream rng2(123);
    int hits = 0;
    for (int i = 0; i < kSamples; ++i) hits += I.contains(st.sample(rng2)) ? 1 : 0;
    CHECK(std::abs(static_cast<double>(hits) / kSamples - p) <= 4.0 * std::sqrt(p * (1 - p) / kSamples));
  }
}
