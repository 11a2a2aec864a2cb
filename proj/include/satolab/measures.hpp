#pragma once

#include <memory>
#include <vector>

#include "satolab/interval.hpp"
#include "satolab/rng.hpp"

/// The Sato-Tate measure on [0, pi] and its p-adic Plancherel deformations.
namespace satolab::measures {

namespace detail {

/// Monotone CDF tabulated on equispaced knots of [0, pi]; brackets a quantile
/// before the Newton solve.
struct KnotTable {
  std::vector<double> values;  // cdf at theta_k = pi k / (size - 1)
  int bracket(double u) const;
  double theta(int k) const;
};

}  // namespace detail

/// (2/pi) sin^2(theta) d theta.
class SatoTateMeasure {
 public:
  SatoTateMeasure();

  double density(double theta) const;
  /// theta/pi - sin(2 theta)/(2 pi).
  double cdf(double theta) const;
  double interval_mass(const ArcInterval& I) const;
  /// Inverse CDF at u in (0, 1).
  double quantile(double u) const;
  /// One uniform from `rng`, mapped through the inverse CDF.
  double sample(RngStream& rng) const { return quantile(rng.next_uniform()); }

 private:
  std::shared_ptr<const detail::KnotTable> knots_;
};

/// Local measure at a prime ideal of norm q:
/// (q+1) / ((q^{1/2} + q^{-1/2})^2 - 4 cos^2 theta) times the Sato-Tate density.
class LocalMeasure {
 public:
  /// Throws ConfigError unless q >= 2 and finite.
  explicit LocalMeasure(double q);

  double q() const { return q_; }
  double density(double theta) const;
  /// density / Sato-Tate density; equals sum_n q^{-n} U_{2n}(cos theta).
  double density_ratio(double theta) const;
  /// int U_m dmu: q^{-m/2} for even m, 0 for odd m.
  double chebyshev_moment(int m) const;
  /// sum_n q^{-n} G_{2n}(theta), G_m(theta) = int_0^theta U_m dmu_infty, summed
  /// until q^{-n} < 1e-14.
  double cdf(double theta) const;
  double interval_mass(const ArcInterval& I) const;
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.next_uniform()); }

 private:
  double q_;
  std::shared_ptr<const detail::KnotTable> knots_;
};

/// Closed-form int U_m dmu for a local measure of norm q.
double chebyshev_moment(double q, int m);

}  // namespace satolab::measures
