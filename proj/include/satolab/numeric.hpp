#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace satolab {

inline constexpr double kPi = std::numbers::pi;

/// Default panel count for composite Simpson quadrature on [0, pi].
inline constexpr int kDefaultPanels = 1 << 14;

/// Neumaier (improved Kahan) running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Pairwise (cascade) summation with a fixed split pattern; the result depends
/// only on the values and their order, never on how they were produced.
double pairwise_sum(std::span<const double> values);

/// Composite Simpson rule on [a, b] with `panels` subintervals (rounded up to
/// an even count, minimum 2).
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  CompensatedSum odd;
  CompensatedSum even;
  for (int i = 1; i < panels; ++i) {
    const double v = f(a + i * h);
    if (i % 2 != 0) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd.value() + 2.0 * even.value());
}

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace satolab
