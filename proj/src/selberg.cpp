#include "satolab/selberg.hpp"

#include <omp.h>

#include <algorithm>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "satolab/error.hpp"

namespace satolab::selberg {

namespace {

constexpr int kPeriodizationTerms = 100;
constexpr double kAsymptoticThreshold = 20.0;
constexpr double kDegreeResidualLimit = 1e-6;

std::complex<double> e_of(double t) {
  const double w = 2.0 * kPi * t;
  return {std::cos(w), std::sin(w)};
}

// (sin(pi r) / (pi r))^2, with r in [-1/2, 1/2].
double sinc_sq(double r) {
  if (r == 0.0) return 1.0;
  const double s = std::sin(kPi * r) / (kPi * r);
  return s * s;
}

// Sum_{n >= N} 1/(n + c)^2 for N + c >= 10: integral plus Euler-Maclaurin terms.
double inverse_square_tail(double start) {
  const double t = start;
  const double t2 = t * t;
  return 1.0 / t + 0.5 / t2 + 1.0 / (6.0 * t2 * t) - 1.0 / (30.0 * t2 * t2 * t);
}

// h(z) with B(z) - sgn(z) = sin^2(pi z) / pi^2 * h(z); smooth away from 0 and
// h(z) = 1/z^2 - 1/(3z^3) + ... for large |z| on both sides.
double excess_envelope(double z) {
  if (std::abs(z) >= kAsymptoticThreshold) {
    const double w = 1.0 / z;
    const double w2 = w * w;
    // -2 sum_k B_{2k} w^{2k+1}, Bernoulli numbers B_2..B_12.
    const double series =
        w2 * w *
        (-1.0 / 3.0 +
         w2 * (1.0 / 15.0 +
               w2 * (-1.0 / 21.0 + w2 * (1.0 / 15.0 + w2 * (-5.0 / 33.0 + w2 * (691.0 / 1365.0))))));
    return w2 + series;
  }
  if (z > 0.0) return 2.0 * (1.0 / z - boost::math::trigamma(z + 1.0));
  return 2.0 * (boost::math::trigamma(-z) + 1.0 / z);
}

// Periodized indicator of J with the mid-point value 1/2 at the two jumps.
double chi_mid(const CircleInterval& J, double x) {
  const double w = J.length();
  double u = x - J.alpha;
  u -= std::floor(u);
  if (u == 0.0) return w >= 1.0 ? 1.0 : 0.5;
  if (u < w) return 1.0;
  if (u == w) return 0.5;
  return 0.0;
}

void sample_point(const CircleInterval& J, int delta, double x, double& plus, double& minus) {
  const double chi = chi_mid(J, x);
  plus = chi + 0.5 * (periodized_excess(x - J.alpha, delta) + periodized_excess(J.beta - x, delta));
  minus =
      chi - 0.5 * (periodized_excess(J.alpha - x, delta) + periodized_excess(x - J.beta, delta));
}

}  // namespace

std::complex<double> chi_hat(const CircleInterval& J, int m) {
  if (m == 0) return {J.length(), 0.0};
  const std::complex<double> num = e_of(-m * J.alpha) - e_of(-m * J.beta);
  return num / std::complex<double>(0.0, 2.0 * kPi * m);
}

double beurling_B(double x, int tail_terms) {
  if (tail_terms < 10) throw std::invalid_argument("beurling_B: tail_terms must be >= 10");
  if (!std::isfinite(x)) throw std::domain_error("beurling_B: non-finite argument");
  const double k = std::nearbyint(x);
  const double r = x - k;
  const double ki = k;
  const double pref = std::pow(std::sin(kPi * r) / kPi, 2);
  const long n_terms = tail_terms + static_cast<long>(std::ceil(std::abs(x)));

  // The term with n = k (first sum) or n = -k (second sum) carries the
  // removable singularity and is handled as sinc^2(r).
  CompensatedSum body;
  for (long n = 0; n < n_terms; ++n) {
    if (ki >= 0.0 && static_cast<double>(n) == ki) continue;
    const double d = x - static_cast<double>(n);
    body += 1.0 / (d * d);
  }
  for (long n = 1; n < n_terms; ++n) {
    if (ki <= -1.0 && static_cast<double>(n) == -ki) continue;
    const double d = x + static_cast<double>(n);
    body += -1.0 / (d * d);
  }
  const double tails = inverse_square_tail(static_cast<double>(n_terms) - x) -
                       inverse_square_tail(static_cast<double>(n_terms) + x);
  double value = pref * (body.value() + tails);
  value += (k == 0.0) ? 2.0 * r * sinc_sq(r) : pref * 2.0 / x;
  value += (ki >= 0.0) ? sinc_sq(r) : -sinc_sq(r);
  return value;
}

double beurling_excess(double z) {
  if (z == 0.0) return 1.0;
  const double r = z - std::nearbyint(z);
  const double s = std::sin(kPi * r) / kPi;
  return s * s * excess_envelope(z);
}

double periodized_excess(double y, int delta) {
  const double r = y - std::nearbyint(y);
  if (r == 0.0) return 1.0;  // g(0) = 1; every other term sits on a zero of sin
  const double d = delta;
  const double s = std::sin(kPi * d * r) / kPi;
  double near = 0.0;
  for (int nu = -kPeriodizationTerms; nu <= kPeriodizationTerms; ++nu) {
    near += excess_envelope(d * (r + nu));
  }
  // |nu| > K: sum 1/(r+nu)^2 by the midpoint rule plus its first correction,
  // and the odd 1/(r+nu)^3 term which nearly cancels between the two sides.
  const double hi = kPeriodizationTerms + 0.5 + r;
  const double lo = kPeriodizationTerms + 0.5 - r;
  auto sq_tail = [](double t) { return 1.0 / t - 1.0 / (12.0 * t * t * t); };
  const double tail = (sq_tail(hi) + sq_tail(lo)) / (d * d) -
                      (0.5 / (hi * hi) - 0.5 / (lo * lo)) / (3.0 * d * d * d);
  return s * s * (near + tail);
}

double selberg_value(const CircleInterval& J, int M, Sign sign, double x) {
  if (M < 1) throw ConfigError("Selberg degree M must be >= 1");
  double plus = 0.0;
  double minus = 0.0;
  sample_point(J, M + 1, x, plus, minus);
  return sign == Sign::plus ? plus : minus;
}

namespace kernels {

void sample_serial(const CircleInterval& J, int M, std::vector<double>& plus,
                   std::vector<double>& minus) {
  const int n = 4 * (M + 1);
  plus.assign(static_cast<std::size_t>(n), 0.0);
  minus.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    sample_point(J, M + 1, static_cast<double>(j) / n, plus[static_cast<std::size_t>(j)],
                 minus[static_cast<std::size_t>(j)]);
  }
}

void sample_parallel(const CircleInterval& J, int M, std::vector<double>& plus,
                     std::vector<double>& minus, int threads) {
  const int n = 4 * (M + 1);
  plus.assign(static_cast<std::size_t>(n), 0.0);
  minus.assign(static_cast<std::size_t>(n), 0.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for num_threads(nt) schedule(static)
  for (int j = 0; j < n; ++j) {
    sample_point(J, M + 1, static_cast<double>(j) / n, plus[static_cast<std::size_t>(j)],
                 minus[static_cast<std::size_t>(j)]);
  }
}

}  // namespace kernels

namespace {

// Coefficients m = 0..max_m of (1/N) sum_j v_j e(-m j / N).
std::vector<std::complex<double>> dft_low(const std::vector<double>& v, int max_m) {
  const std::size_t n = v.size();
  std::vector<double> c(n);
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    c[k] = std::cos(w);
    s[k] = std::sin(w);
  }
  std::vector<std::complex<double>> out(static_cast<std::size_t>(max_m) + 1);
  for (int m = 0; m <= max_m; ++m) {
    CompensatedSum re;
    CompensatedSum im;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      re += v[j] * c[idx];
      im += -v[j] * s[idx];
      idx += static_cast<std::size_t>(m);
      if (idx >= n) idx %= n;
    }
    out[static_cast<std::size_t>(m)] = {re.value() / static_cast<double>(n),
                                        im.value() / static_cast<double>(n)};
  }
  return out;
}

}  // namespace

std::complex<double> ExtremalPair::s_hat(Sign sign, int m) const {
  if (m < -degree || m > degree) return {0.0, 0.0};
  const auto& v = sign == Sign::plus ? s_plus : s_minus;
  return v[static_cast<std::size_t>(m + degree)];
}

double ExtremalPair::eval_circle(Sign sign, double x) const {
  double acc = s_hat(sign, 0).real();
  for (int m = 1; m <= degree; ++m) acc += 2.0 * (s_hat(sign, m) * e_of(m * x)).real();
  return acc;
}

ExtremalPair selberg_coefficients(const CircleInterval& J, int M, int threads) {
  if (M < 1) throw ConfigError("Selberg degree M must be >= 1, got " + std::to_string(M));
  std::vector<double> plus;
  std::vector<double> minus;
  if (threads == 1) {
    kernels::sample_serial(J, M, plus, minus);
  } else {
    kernels::sample_parallel(J, M, plus, minus, threads);
  }
  const auto hat_plus = dft_low(plus, 2 * M);
  const auto hat_minus = dft_low(minus, 2 * M);

  ExtremalPair pair;
  pair.degree = M;
  pair.alpha = J.alpha;
  pair.beta = J.beta;
  for (int m = M + 1; m <= 2 * M; ++m) {
    pair.truncation_residual =
        std::max({pair.truncation_residual, std::abs(hat_plus[static_cast<std::size_t>(m)]),
                  std::abs(hat_minus[static_cast<std::size_t>(m)])});
  }
  if (pair.truncation_residual > kDegreeResidualLimit) {
    throw ContractError("Selberg coefficients beyond degree M are not negligible (residual " +
                        std::to_string(pair.truncation_residual) + ")");
  }
  pair.s_plus.resize(static_cast<std::size_t>(2 * M + 1));
  pair.s_minus.resize(static_cast<std::size_t>(2 * M + 1));
  for (int m = -M; m <= M; ++m) {
    const auto i = static_cast<std::size_t>(std::abs(m));
    const auto at = static_cast<std::size_t>(m + M);
    pair.s_plus[at] = m >= 0 ? hat_plus[i] : std::conj(hat_plus[i]);
    pair.s_minus[at] = m >= 0 ? hat_minus[i] : std::conj(hat_minus[i]);
  }
  // Real-valued polynomials: the constant term is real.
  pair.s_plus[static_cast<std::size_t>(M)].imag(0.0);
  pair.s_minus[static_cast<std::size_t>(M)].imag(0.0);
  return pair;
}

ExtremalPair to_chebyshev(const ArcInterval& I, int M, int threads) {
  if (M < 3) throw ConfigError("Chebyshev majorant needs M >= 3, got " + std::to_string(M));
  ExtremalPair pair = selberg_coefficients(CircleInterval::from_arc(I), M, threads);
  pair.arc = I;
  auto fold = [&](Sign sign) {
    // Symmetrized coefficients S(m) + S(-m), zero past the degree.
    std::vector<double> sym(static_cast<std::size_t>(M) + 3, 0.0);
    for (int m = 0; m <= M; ++m) {
      sym[static_cast<std::size_t>(m)] = (pair.s_hat(sign, m) + pair.s_hat(sign, -m)).real();
    }
    std::vector<double> f(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
      f[static_cast<std::size_t>(m)] =
          sym[static_cast<std::size_t>(m)] - sym[static_cast<std::size_t>(m + 2)];
    }
    return chebyshev::Series(std::move(f));
  };
  pair.f_plus = fold(Sign::plus);
  pair.f_minus = fold(Sign::minus);
  return pair;
}

double mu_infty_interval(const ArcInterval& I) {
  return (I.b - I.a) / kPi - (std::sin(2.0 * I.b) - std::sin(2.0 * I.a)) / (2.0 * kPi);
}

SignedPair variance_sum(const ExtremalPair& pair) {
  if (!pair.arc) throw std::logic_error("variance_sum: pair has no Chebyshev expansion");
  CompensatedSum p;
  CompensatedSum m;
  for (int k = 1; k <= pair.degree; ++k) {
    p += pair.f_plus[k] * pair.f_plus[k];
    m += pair.f_minus[k] * pair.f_minus[k];
  }
  return {p.value(), m.value()};
}

SignedPair mass_defect(const ExtremalPair& pair) {
  const double len = pair.beta - pair.alpha;
  return {pair.s_hat(Sign::plus, 0).real() - len, len - pair.s_hat(Sign::minus, 0).real()};
}

double max_sandwich_violation(const ExtremalPair& pair, int points) {
  constexpr double kJumpGuard = 1e-12;
  double worst = 0.0;
  auto near_jump = [&](double x, double jump, double period) {
    const double d = std::remainder(x - jump, period);
    return std::abs(d) < kJumpGuard;
  };
  for (int k = 0; k < points; ++k) {
    const double x = -0.5 + static_cast<double>(k) / points;
    if (near_jump(x, pair.alpha, 1.0) || near_jump(x, pair.beta, 1.0)) continue;
    const double chi = (pair.alpha <= x && x <= pair.beta) ? 1.0 : 0.0;
    worst = std::max({worst, pair.eval_circle(Sign::minus, x) - chi,
                      chi - pair.eval_circle(Sign::plus, x)});
  }
  if (pair.arc) {
    const ArcInterval& I = *pair.arc;
    for (int k = 0; k < points; ++k) {
      const double theta = kPi * static_cast<double>(k) / (points - 1);
      if (std::abs(theta - I.a) < kJumpGuard || std::abs(theta - I.b) < kJumpGuard) continue;
      const double chi = I.contains(theta) ? 1.0 : 0.0;
      worst = std::max({worst, pair.eval_arc(Sign::minus, theta) - chi,
                        chi - pair.eval_arc(Sign::plus, theta)});
    }
  }
  return worst;
}

}  // namespace satolab::selberg
