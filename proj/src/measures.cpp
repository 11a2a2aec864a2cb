#include "satolab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace satolab::measures {

namespace {

constexpr int kKnots = 257;
constexpr double kSeriesCutoff = 1e-14;
constexpr double kQuantileTol = 1e-12;

void check_theta(double theta) {
  if (!std::isfinite(theta) || theta < 0.0 || theta > kPi) {
    throw std::domain_error("angle must lie in [0, pi], got " + std::to_string(theta));
  }
}

void check_u(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile level must lie in (0, 1)");
}

template <class Cdf>
std::shared_ptr<const detail::KnotTable> tabulate(Cdf&& cdf) {
  auto t = std::make_shared<detail::KnotTable>();
  t->values.resize(kKnots);
  for (int k = 0; k < kKnots; ++k) t->values[static_cast<std::size_t>(k)] = cdf(t->theta(k));
  t->values.front() = 0.0;
  t->values.back() = 1.0;
  return t;
}

// Safeguarded Newton on cdf(theta) = u inside the knot bracket.
template <class Cdf, class Density>
double invert(const detail::KnotTable& knots, double u, Cdf&& cdf, Density&& density) {
  const int k = knots.bracket(u);
  double lo = knots.theta(k);
  double hi = knots.theta(k + 1);
  const double flo = knots.values[static_cast<std::size_t>(k)];
  const double fhi = knots.values[static_cast<std::size_t>(k) + 1];
  double theta = fhi > flo ? lo + (hi - lo) * (u - flo) / (fhi - flo) : 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = cdf(theta) - u;
    if (f == 0.0) return theta;
    if (f < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    const double d = density(theta);
    double next = d > 0.0 ? theta - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - theta);
    theta = next;
    if (step < kQuantileTol || hi - lo < kQuantileTol) break;
  }
  return theta;
}

}  // namespace

int detail::KnotTable::bracket(double u) const {
  auto it = std::upper_bound(values.begin(), values.end(), u);
  const auto k = static_cast<int>(it - values.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(values.size()) - 2);
}

double detail::KnotTable::theta(int k) const {
  return kPi * static_cast<double>(k) / static_cast<double>(values.size() - 1);
}

SatoTateMeasure::SatoTateMeasure() {
  static const auto shared = tabulate([this](double t) { return cdf(t); });
  knots_ = shared;
}

double SatoTateMeasure::density(double theta) const {
  check_theta(theta);
  const double s = std::sin(theta);
  return 2.0 / kPi * s * s;
}

double SatoTateMeasure::cdf(double theta) const {
  check_theta(theta);
  if (theta == kPi) return 1.0;
  return std::clamp(theta / kPi - std::sin(2.0 * theta) / (2.0 * kPi), 0.0, 1.0);
}

double SatoTateMeasure::interval_mass(const ArcInterval& I) const { return cdf(I.b) - cdf(I.a); }

double SatoTateMeasure::quantile(double u) const {
  check_u(u);
  return invert(
      *knots_, u, [this](double t) { return cdf(t); },
      [this](double t) { return density(t); });
}

LocalMeasure::LocalMeasure(double q) : q_(q) {
  if (!std::isfinite(q) || q < 2.0) {
    throw ConfigError("local measure needs a norm q >= 2, got " + std::to_string(q));
  }
  knots_ = tabulate([this](double t) { return cdf(t); });
}

double LocalMeasure::density_ratio(double theta) const {
  check_theta(theta);
  const double c = std::cos(theta);
  return (q_ + 1.0) / (q_ + 2.0 + 1.0 / q_ - 4.0 * c * c);
}

double LocalMeasure::density(double theta) const {
  const double s = std::sin(theta);
  return density_ratio(theta) * 2.0 / kPi * s * s;
}

double LocalMeasure::chebyshev_moment(int m) const { return measures::chebyshev_moment(q_, m); }

double LocalMeasure::cdf(double theta) const {
  check_theta(theta);
  if (theta == 0.0) return 0.0;
  if (theta == kPi) return 1.0;
  // G_0 = (theta - sin 2theta / 2) / pi and, for m >= 1,
  // G_m = (sin(m theta)/m - sin((m+2) theta)/(m+2)) / pi.
  // s_n = sin(2 n theta) by the recurrence s_{n+1} = 2 cos(2 theta) s_n - s_{n-1}.
  const double c2 = std::cos(2.0 * theta);
  double s_prev = 0.0;
  double s_cur = std::sin(2.0 * theta);
  double acc = theta - 0.5 * s_cur;
  const double r = 1.0 / q_;
  double w = r;
  for (int n = 1; w >= kSeriesCutoff; ++n) {
    const double s_next = 2.0 * c2 * s_cur - s_prev;
    acc += w * (s_cur / (2.0 * n) - s_next / (2.0 * n + 2.0));
    s_prev = s_cur;
    s_cur = s_next;
    w *= r;
  }
  return std::clamp(acc / kPi, 0.0, 1.0);
}

double LocalMeasure::interval_mass(const ArcInterval& I) const { return cdf(I.b) - cdf(I.a); }

double LocalMeasure::quantile(double u) const {
  check_u(u);
  return invert(
      *knots_, u, [this](double t) { return cdf(t); },
      [this](double t) { return density(t); });
}

double chebyshev_moment(double q, int m) {
  if (m < 0) throw std::invalid_argument("chebyshev_moment: negative index");
  if (!std::isfinite(q) || q < 2.0) throw ConfigError("chebyshev_moment: norm q must be >= 2");
  if (m % 2 != 0) return 0.0;
  return std::pow(q, -0.5 * m);
}

}  // namespace satolab::measures
