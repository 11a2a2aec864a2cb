#pragma once

#include <functional>
#include <span>
#include <vector>

#include "satolab/numeric.hpp"

/// Chebyshev polynomials of the second kind U_n, viewed as functions of an
/// angle through x = cos(theta). They are orthonormal for the Sato-Tate
/// measure (2/pi) sin^2(theta) dtheta on [0, pi].
namespace satolab::chebyshev {

/// Finite expansion sum_{m=0}^{M} c_m U_m(cos theta), stored densely.
class Series {
 public:
  Series() : coeffs_{0.0} {}
  /// Throws std::invalid_argument on an empty vector or non-finite entries.
  explicit Series(std::vector<double> coeffs);

  /// The single basis element U_n.
  static Series unit(int n);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// Coefficient of U_m; zero beyond the stored degree.
  double operator[](int m) const {
    return (m >= 0 && m <= degree()) ? coeffs_[static_cast<std::size_t>(m)] : 0.0;
  }
  std::span<const double> coeffs() const { return coeffs_; }

  /// Value at angle theta (Clenshaw recurrence in cos theta).
  double eval(double theta) const;
  /// Value at x in [-1, 1].
  double eval_x(double x) const;

 private:
  std::vector<double> coeffs_;
};

/// U_n(cos theta) for theta in [0, pi]. Uses sin((n+1)theta)/sin(theta) in
/// the interior and the three-term recurrence where |sin theta| < 1e-6.
/// Throws std::domain_error for theta outside [0, pi] or non-finite.
double eval_u(int n, double theta);

/// U_n(x) by the three-term recurrence.
double eval_u_x(int n, double x);

/// Indices {m+n-2k : k = 0..min(m,n)} with U_m U_n = sum_k U_{m+n-2k}.
std::vector<int> linearize_product(int m, int n);

/// Exact product of two expansions; degree(a*b) = degree(a) + degree(b).
Series product(const Series& a, const Series& b);

/// (2/pi) int_0^pi f(theta) U_n(cos theta) sin^2(theta) dtheta by composite
/// Simpson with `panels` subintervals. Throws std::domain_error if f returns a
/// non-finite value.
double fourier_coefficient(const std::function<double(double)>& f, int n,
                           int panels = kDefaultPanels);

/// Exact coefficient of U_n in `s` (orthonormality).
double fourier_coefficient(const Series& s, int n);

}  // namespace satolab::chebyshev
