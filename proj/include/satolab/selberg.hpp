#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "satolab/chebyshev.hpp"
#include "satolab/interval.hpp"

/// Beurling-Selberg majorant and minorant trigonometric polynomials for
/// interval indicators, and their re-expansion in the U_m(cos theta) basis.
namespace satolab::selberg {

enum class Sign { plus, minus };

/// Fourier coefficient of the indicator of J: int_J e(-m t) dt.
std::complex<double> chi_hat(const CircleInterval& J, int m);

/// Beurling's entire majorant of sgn(x), by direct summation of its defining
/// series with `tail_terms` terms past |x| and an Euler-Maclaurin tail.
/// Throws std::invalid_argument if tail_terms < 10.
double beurling_B(double x, int tail_terms = 200);

/// B(z) - sgn(z), evaluated in closed form through the trigamma function.
/// Non-negative, integrates to 1 over the real line; equals 1 at z = 0.
double beurling_excess(double z);

/// sum over integers nu of beurling_excess(delta * (y + nu)) for integer
/// delta >= 1: terms |nu| <= 100 are summed directly, the rest through an
/// integral comparison of the 1/z^2 and 1/z^3 tails.
double periodized_excess(double y, int delta);

/// Selberg polynomial value S^{+-}(x) computed from the periodized
/// construction (not from coefficients).
double selberg_value(const CircleInterval& J, int M, Sign sign, double x);

struct ExtremalPair {
  int degree = 0;
  double alpha = 0.0;
  double beta = 0.0;
  /// Coefficients for m = -degree..degree, stored at index m + degree.
  std::vector<std::complex<double>> s_plus;
  std::vector<std::complex<double>> s_minus;
  /// Largest |coefficient| found at degree < |m| <= 2 degree before zeroing.
  double truncation_residual = 0.0;
  /// Present once re-expanded in the Chebyshev basis (to_chebyshev).
  std::optional<ArcInterval> arc;
  chebyshev::Series f_plus;
  chebyshev::Series f_minus;

  std::complex<double> s_hat(Sign sign, int m) const;
  const chebyshev::Series& f(Sign sign) const { return sign == Sign::plus ? f_plus : f_minus; }
  /// Trigonometric polynomial sum_m S^(m) e(m x).
  double eval_circle(Sign sign, double x) const;
  /// Chebyshev expansion F(theta) = sum_m F^(m) U_m(cos theta).
  double eval_arc(Sign sign, double theta) const { return f(sign).eval(theta); }
};

/// Samples S^{+-} on 4(M+1) equispaced points and recovers its coefficients by
/// discrete Fourier transform. Coefficients at M < |m| <= 2M must be below
/// 1e-6 (ContractError otherwise); they are then set to zero.
/// `threads` <= 0 uses the OpenMP default; 1 runs the serial kernel.
ExtremalPair selberg_coefficients(const CircleInterval& J, int M, int threads = 0);

/// Majorant/minorant of an arc indicator in the U_m basis: the circle pair for
/// J = I / (2 pi), folded as F(theta) = S(theta / 2pi) + S(-theta / 2pi).
/// Requires M >= 3.
ExtremalPair to_chebyshev(const ArcInterval& I, int M, int threads = 0);

/// Sato-Tate mass of I: (b - a)/pi - (sin 2b - sin 2a)/(2 pi).
double mu_infty_interval(const ArcInterval& I);

struct SignedPair {
  double plus;
  double minus;
};

/// sum_{m=1}^{M} F^(m)^2 for each sign.
SignedPair variance_sum(const ExtremalPair& pair);

/// S^(0) - |J| for the majorant and |J| - S^(0) for the minorant.
SignedPair mass_defect(const ExtremalPair& pair);

/// Largest violation of S^- <= chi_J <= S^+ on `points` equispaced circle
/// points, and of F^- <= chi_I <= F^+ on `points` points of [0, pi] when the
/// arc expansion is present. Points within 1e-12 of a jump are skipped.
double max_sandwich_violation(const ExtremalPair& pair, int points = 10000);

/// Sample kernels behind selberg_coefficients, exposed for the benchmark and
/// the serial/parallel agreement test.
namespace kernels {
void sample_serial(const CircleInterval& J, int M, std::vector<double>& plus,
                   std::vector<double>& minus);
void sample_parallel(const CircleInterval& J, int M, std::vector<double>& plus,
                     std::vector<double>& minus, int threads);
}  // namespace kernels

}  // namespace satolab::selberg
