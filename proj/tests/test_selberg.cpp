#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <complex>

#include "satolab/error.hpp"
#include "satolab/selberg.hpp"

using namespace satolab;
using selberg::Sign;
using cd = std::complex<double>;

namespace {

cd e(double x) { return std::polar(1.0, 2.0 * kPi * x); }

// Closed-form coefficients of the extremal pair (Vaaler's formula), independent
// of the sampling construction in the library.
cd vaaler_coefficient(double alpha, double beta, int M, Sign sign, int m) {
  const double delta = M + 1.0;
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  if (m == 0) return {beta - alpha + s / delta, 0.0};
  if (std::abs(m) > M) return {0.0, 0.0};
  const double u = std::abs(m) / delta;
  const double j = kPi * u * (1.0 - u) / std::tan(kPi * u) + u;
  const cd chi = (e(-m * alpha) - e(-m * beta)) / cd(0.0, 2.0 * kPi * m);
  return j * chi + s / (2.0 * delta) * (1.0 - u) * (e(-m * alpha) + e(-m * beta));
}

cd chi_hat_quadrature(double alpha, double beta, int m) {
  auto re = [&](double t) { return std::cos(2.0 * kPi * m * t); };
  auto im = [&](double t) { return -std::sin(2.0 * kPi * m * t); };
  return {simpson(re, alpha, beta, 4096), simpson(im, alpha, beta, 4096)};
}

double vaaler_variance_sum(const ArcInterval& I, int M, Sign sign) {
  const auto J = CircleInterval::from_arc(I);
  auto cal_s = [&](int m) {
    return (vaaler_coefficient(J.alpha, J.beta, M, sign, m) +
            vaaler_coefficient(J.alpha, J.beta, M, sign, -m)).real();
  };
  double v = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double f = cal_s(m) - cal_s(m + 2);
    v += f * f;
  }
  return v;
}

}  // namespace

TEST_SUITE("selberg") {
  TEST_CASE("chi_hat examples") {
    const CircleInterval J(-0.25, 0.25);
    CHECK(std::abs(selberg::chi_hat(J, 0) - cd(0.5, 0.0)) <= 1e-15);
    CHECK(std::abs(selberg::chi_hat(J, 2)) <= 1e-15);
    const cd expect = (1.0 - e(-0.25)) / cd(0.0, 2.0 * kPi);
    const cd got = selberg::chi_hat(CircleInterval(0.0, 0.25), 1);
    CHECK(std::abs(got - expect) <= 1e-15);
    CHECK(got.real() == doctest::Approx(0.15915).epsilon(1e-4));
    CHECK(got.imag() == doctest::Approx(-0.15915).epsilon(1e-4));
    for (int m = -6; m <= 6; ++m) {
      CHECK(std::abs(selberg::chi_hat(CircleInterval(-0.1, 0.37), m) -
                     chi_hat_quadrature(-0.1, 0.37, m)) <= 1e-12);
    }
  }

  TEST_CASE("Beurling function") {
    CHECK(std::abs(selberg::beurling_B(50.5) - 1.0) <= 1e-3);
    CHECK(selberg::beurling_excess(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(selberg::beurling_B(1.0, 5), std::invalid_argument);
    for (double x = -12.0; x <= 12.0; x += 0.173) {
      const double sgn = x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0);
      const double direct = selberg::beurling_B(x, 2000) - sgn;
      const double closed = selberg::beurling_excess(x);
      CHECK(std::abs(direct - closed) <= 1e-6);
      CHECK(closed >= -1e-15);
    }
  }

  TEST_CASE("Beurling excess has unit mass") {
    // Tail of B - sgn decays like 1/(2 pi^2 x^2) on average, so beyond L the
    // missing mass is about 1/(pi^2 L).
    const double L = 2000.0;
    const double body = simpson([](double z) { return selberg::beurling_excess(z); }, -L, L, 1 << 20);
    const double tail = 1.0 / (kPi * kPi * L);
    CHECK(std::abs(body + tail - 1.0) <= 1e-3);
  }

  TEST_CASE("coefficients match the closed form") {
    for (int M : {1, 4, 10, 37}) {
      for (auto [a, b] : {std::pair{0.0, 0.25}, std::pair{-0.3, 0.1}, std::pair{0.125, 0.25}}) {
        const CircleInterval J(a, b);
        const auto pair = selberg::selberg_coefficients(J, M, 1);
        double worst = 0.0;
        for (Sign s : {Sign::plus, Sign::minus}) {
          for (int m = -M - 2; m <= M + 2; ++m) {
            worst = std::max(worst, std::abs(pair.s_hat(s, m) - vaaler_coefficient(a, b, M, s, m)));
          }
        }
        CHECK(worst <= 1e-9);
      }
    }
  }

  TEST_CASE("mass defect on J = [0, 1/4], M = 10") {
    const auto pair = selberg::selberg_coefficients(CircleInterval(0.0, 0.25), 10);
    CHECK(std::abs(pair.s_hat(Sign::plus, 0).real() - (0.25 + 1.0 / 11.0)) <= 1e-9);
    CHECK(std::abs(pair.s_hat(Sign::minus, 0).real() - (0.25 - 1.0 / 11.0)) <= 1e-9);
    const auto d = selberg::mass_defect(pair);
    CHECK(std::abs(d.plus - 1.0 / 11.0) <= 1e-9);
    CHECK(std::abs(d.minus - 1.0 / 11.0) <= 1e-9);
    CHECK(std::abs(pair.s_hat(Sign::plus, 0).real() + pair.s_hat(Sign::minus, 0).real() - 0.5) <= 2e-9);
    CHECK(pair.s_hat(Sign::plus, 11) == cd(0.0, 0.0));
    CHECK(pair.s_hat(Sign::minus, -40) == cd(0.0, 0.0));
  }

  TEST_CASE("coefficient bound and truncation residual") {
    for (int M : {10, 50, 120}) {
      const CircleInterval J(0.125, 0.25);
      const auto pair = selberg::selberg_coefficients(J, M);
      CHECK(pair.truncation_residual <= 1e-8);
      for (Sign s : {Sign::plus, Sign::minus}) {
        for (int m = -M; m <= M; ++m) {
          CHECK(std::abs(pair.s_hat(s, m) - selberg::chi_hat(J, m)) <= 1.0 / (M + 1.0) + 1e-9);
        }
      }
    }
  }

  TEST_CASE("sandwich on the circle and on the arc") {
    for (int M : {3, 10, 50}) {
      for (auto [a, b] : {std::pair{kPi / 4, kPi / 2}, std::pair{0.0, kPi}, std::pair{0.0, 1.0},
                          std::pair{2.0, kPi}}) {
        const auto pair = selberg::to_chebyshev(ArcInterval(a, b), M);
        CHECK(selberg::max_sandwich_violation(pair, 10000) <= 1e-9);
      }
    }
  }

  TEST_CASE("serial and parallel sample kernels agree exactly") {
    const CircleInterval J(0.1, 0.3);
    for (int M : {5, 64}) {
      std::vector<double> p1, m1, p2, m2;
      selberg::kernels::sample_serial(J, M, p1, m1);
      selberg::kernels::sample_parallel(J, M, p2, m2, 4);
      CHECK(p1 == p2);
      CHECK(m1 == m2);
    }
    const auto a = selberg::selberg_coefficients(J, 30, 1);
    const auto b = selberg::selberg_coefficients(J, 30, 3);
    CHECK(a.s_plus == b.s_plus);
    CHECK(a.s_minus == b.s_minus);
  }

  TEST_CASE("polynomial values against the periodized construction") {
    const CircleInterval J(-0.2, 0.15);
    const auto pair = selberg::selberg_coefficients(J, 12);
    for (int i = 0; i < 200; ++i) {
      const double x = -0.5 + i / 199.0;
      CHECK(std::abs(pair.eval_circle(Sign::plus, x) - selberg::selberg_value(J, 12, Sign::plus, x)) <= 1e-9);
      CHECK(std::abs(pair.eval_circle(Sign::minus, x) - selberg::selberg_value(J, 12, Sign::minus, x)) <= 1e-9);
    }
  }

  TEST_CASE("Chebyshev expansion equals the folded circle polynomial") {
    const ArcInterval I(kPi / 4, kPi / 2);
    const auto pair = selberg::to_chebyshev(I, 40);
    double worst = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double theta = kPi * i / 5000.0;
      const double t = theta / (2.0 * kPi);
      for (Sign s : {Sign::plus, Sign::minus}) {
        const double folded = pair.eval_circle(s, t) + pair.eval_circle(s, -t);
        worst = std::max(worst, std::abs(pair.eval_arc(s, theta) - folded));
      }
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("zeroth Chebyshev coefficient approaches the Sato-Tate mass") {
    const ArcInterval I(kPi / 4, kPi / 2);
    const double mu = selberg::mu_infty_interval(I);
    for (int M : {10, 50, 200}) {
      const auto pair = selberg::to_chebyshev(I, M);
      CHECK(std::abs(pair.f_plus[0] - mu) <= 4.0 / (M + 1.0));
      CHECK(std::abs(pair.f_minus[0] - mu) <= 4.0 / (M + 1.0));
      CHECK(pair.f_minus[0] <= mu);
      CHECK(pair.f_plus[0] >= mu);
    }
  }

  TEST_CASE("L1 defect of the Chebyshev pair") {
    // Exact value of int (F+ - F-) dmu_inf: 4/delta - (2/delta)(1 - 2/delta)(cos 2a + cos 2b).
    for (auto [a, b] : {std::pair{kPi / 4, kPi / 2}, std::pair{0.3, 1.0}, std::pair{1.0, 2.9}}) {
      for (int M : {10, 50}) {
        const auto pair = selberg::to_chebyshev(ArcInterval(a, b), M);
        const double d = M + 1.0;
        const double gap = pair.f_plus[0] - pair.f_minus[0];
        const double exact = 4.0 / d - (2.0 / d) * (1.0 - 2.0 / d) * (std::cos(2 * a) + std::cos(2 * b));
        CHECK(std::abs(gap - exact) <= 1e-9);
        CHECK(gap <= 8.0 / d);
        if (std::cos(2 * a) + std::cos(2 * b) >= 0.0) CHECK(gap <= 4.0 / d);
      }
    }
  }

  TEST_CASE("folded circle coefficients approach the arc indicator coefficients") {
    const ArcInterval I(kPi / 4, kPi / 2);
    const auto J = CircleInterval::from_arc(I);
    for (int M : {10, 50}) {
      const auto pair = selberg::selberg_coefficients(J, M);
      for (Sign s : {Sign::plus, Sign::minus}) {
        CHECK(std::abs((pair.s_hat(s, 0) + pair.s_hat(s, 0)).real() - (2.0 * (J.beta - J.alpha) +
              (s == Sign::plus ? 2.0 : -2.0) / (M + 1.0))) <= 1e-9);
        for (int m = 1; m <= M; ++m) {
          const double cal = (pair.s_hat(s, m) + pair.s_hat(s, -m)).real();
          const double target = (std::sin(m * I.b) - std::sin(m * I.a)) / (m * kPi);
          CHECK(std::abs(cal - target) <= 2.0 / (M + 1.0) + 1e-9);
        }
      }
    }
  }

  TEST_CASE("mu_infty_interval") {
    CHECK(selberg::mu_infty_interval(ArcInterval(0.0, kPi)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(selberg::mu_infty_interval(ArcInterval(0.0, kPi / 2)) == doctest::Approx(0.5).epsilon(1e-15));
    const double v = selberg::mu_infty_interval(ArcInterval(kPi / 4, kPi / 2));
    CHECK(v == doctest::Approx(0.25 + 1.0 / (2.0 * kPi)).epsilon(1e-14));
    const double quad = simpson([](double t) { return 2.0 / kPi * std::sin(t) * std::sin(t); }, kPi / 4,
                                kPi / 2, 1000);
    CHECK(std::abs(v - quad) <= 1e-12);
  }

  TEST_CASE("variance_sum") {
    const ArcInterval I(kPi / 4, kPi / 2);
    const double mu = selberg::mu_infty_interval(I);
    const double target = mu - mu * mu;
    CHECK(target == doctest::Approx(0.24174).epsilon(1e-4));
    const auto p80 = selberg::to_chebyshev(I, 80);
    const auto p10 = selberg::to_chebyshev(I, 10);
    const auto v80 = selberg::variance_sum(p80);
    const auto v10 = selberg::variance_sum(p10);
    CHECK(std::abs(v80.plus - target) <= 0.5 * std::log(80.0) / 80.0);
    CHECK(std::abs(v80.minus - target) <= 0.5 * std::log(80.0) / 80.0);
    CHECK(std::abs(v80.plus - target) < std::abs(v10.plus - target));
    CHECK(std::abs(v80.plus - vaaler_variance_sum(I, 80, Sign::plus)) <= 1e-9);
    CHECK(std::abs(v10.minus - vaaler_variance_sum(I, 10, Sign::minus)) <= 1e-9);
  }

  TEST_CASE("variance_sum of the full arc decays like M^-3") {
    const ArcInterval I(0.0, kPi);
    double prev = 1.0;
    for (int M : {10, 20, 40, 80, 160}) {
      const auto v = selberg::variance_sum(selberg::to_chebyshev(I, M));
      CHECK(std::abs(v.plus - vaaler_variance_sum(I, M, Sign::plus)) <= 1e-12);
      CHECK(v.plus <= 10.0 / std::pow(M + 1.0, 3));
      CHECK(v.plus < prev);
      prev = v.plus;
    }
    CHECK(selberg::variance_sum(selberg::to_chebyshev(I, 400)).plus <= 1e-6);
  }

  TEST_CASE("bad degrees") {
    const CircleInterval J(0.0, 0.25);
    CHECK_THROWS_AS(selberg::selberg_coefficients(J, 0), ConfigError);
    CHECK_THROWS_AS(selberg::to_chebyshev(ArcInterval(0.1, 0.2), 2), ConfigError);
    CHECK_THROWS_AS(ArcInterval(0.5, 0.5), ConfigError);
    CHECK_THROWS_AS(CircleInterval(0.1, 0.6), ConfigError);
  }
}
