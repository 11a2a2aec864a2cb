#include "satolab/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace satolab::chebyshev {

Series::Series(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("Series: empty coefficient vector");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("Series: non-finite coefficient");
  }
}

Series Series::unit(int n) {
  if (n < 0) throw std::invalid_argument("Series::unit: negative index");
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c.back() = 1.0;
  return Series(std::move(c));
}

double Series::eval_x(double x) const {
  double b1 = 0.0;
  double b2 = 0.0;
  const double two_x = 2.0 * x;
  for (int k = degree(); k >= 0; --k) {
    const double b0 = coeffs_[static_cast<std::size_t>(k)] + two_x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

double Series::eval(double theta) const { return eval_x(std::cos(theta)); }

double eval_u_x(int n, double x) {
  if (n < 0) throw std::invalid_argument("eval_u: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 2; k <= n; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_u(int n, double theta) {
  if (n < 0) throw std::invalid_argument("eval_u: negative degree");
  if (!std::isfinite(theta) || theta < 0.0 || theta > kPi) {
    throw std::domain_error("eval_u: theta must lie in [0, pi], got " + std::to_string(theta));
  }
  if (theta == 0.0) return n + 1.0;
  if (theta == kPi) return (n % 2 == 0 ? 1.0 : -1.0) * (n + 1.0);
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-6) return eval_u_x(n, std::cos(theta));
  // (n+1)*theta carried as an unevaluated sum p + e so the large argument
  // does not lose the low bits of theta.
  const double k = n + 1.0;
  const double p = k * theta;
  const double e = std::fma(k, theta, -p);
  return (std::sin(p) + e * std::cos(p)) / s;
}

std::vector<int> linearize_product(int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("linearize_product: negative index");
  if (m < n) std::swap(m, n);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) out.push_back(m + n - 2 * k);
  return out;
}

Series product(const Series& a, const Series& b) {
  const int da = a.degree();
  const int db = b.degree();
  const int d = da + db;
  // Each a_i b_j lands on the arithmetic progression |i-j|, |i-j|+2, ..., i+j.
  // Record it as a step in a stride-2 difference array, then prefix-sum.
  std::vector<double> diff(static_cast<std::size_t>(d) + 3, 0.0);
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  for (int i = 0; i <= da; ++i) {
    const double ai = ac[static_cast<std::size_t>(i)];
    if (ai == 0.0) continue;
    for (int j = 0; j <= db; ++j) {
      const double v = ai * bc[static_cast<std::size_t>(j)];
      diff[static_cast<std::size_t>(std::abs(i - j))] += v;
      diff[static_cast<std::size_t>(i + j + 2)] -= v;
    }
  }
  std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
  for (int k = 0; k <= d; ++k) {
    c[static_cast<std::size_t>(k)] =
        diff[static_cast<std::size_t>(k)] + (k >= 2 ? c[static_cast<std::size_t>(k - 2)] : 0.0);
  }
  return Series(std::move(c));
}

double fourier_coefficient(const std::function<double(double)>& f, int n, int panels) {
  if (n < 0) throw std::invalid_argument("fourier_coefficient: negative index");
  auto integrand = [&](double theta) {
    const double v = f(theta);
    if (!std::isfinite(v)) {
      throw std::domain_error("fourier_coefficient: f is not finite at theta = " +
                              std::to_string(theta));
    }
    const double s = std::sin(theta);
    return v * eval_u(n, std::clamp(theta, 0.0, kPi)) * s * s;
  };
  return 2.0 / kPi * simpson(integrand, 0.0, kPi, panels);
}

double fourier_coefficient(const Series& s, int n) {
  if (n < 0) throw std::invalid_argument("fourier_coefficient: negative index");
  return s[n];
}

}  // namespace satolab::chebyshev
