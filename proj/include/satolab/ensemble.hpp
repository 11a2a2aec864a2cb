#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satolab/interval.hpp"
#include "satolab/measures.hpp"
#include "satolab/number_field.hpp"

/// Independent-angle model of a family of forms: every member draws one angle
/// per prime ideal from the local measure at that ideal.
namespace satolab::ensemble {

/// Even test function Phi. Gaussian: exp(-lambda u^2). Custom: values on an
/// increasing grid of u >= 0 starting at 0, linearly interpolated in |u| and
/// zero past the last node.
struct SmoothSpec {
  enum class Kind { gaussian, custom };
  Kind kind = Kind::gaussian;
  double lambda = 1.0;
  double omega = 2.0;
  std::vector<double> table_u;
  std::vector<double> table_phi;

  void validate() const;
  double phi(double u) const;
  /// |u| beyond which the remaining periodization tail is below 1e-12.
  double cutoff() const;
};

enum class StatisticKind { indicator, smooth };

struct EnsembleConfig {
  number_field::FieldSpec field = number_field::FieldSpec::real_quadratic(5);
  number_field::LevelSpec level;
  double x = 1e4;
  std::int64_t H = 1000;
  std::uint64_t seed = 1;
  StatisticKind statistic = StatisticKind::indicator;
  ArcInterval interval{kPi / 4.0, kPi / 2.0};
  SmoothSpec smooth;
  double smooth_M = 4.0;
  int R = 6;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 edges on [-5, 5]
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
};

struct MomentReport {
  std::int64_t H = 0;
  std::int64_t pi_L_x = 0;
  double center = 0.0;
  double scale = 0.0;
  double raw_mean = 0.0;
  double raw_variance = 0.0;
  /// Exact mean and variance of the statistic under the model.
  double mean_model = 0.0;
  double variance_model = 0.0;
  /// (mean_model - center) / scale and variance_model / scale^2.
  double mean_model_standardized = 0.0;
  double variance_model_standardized = 0.0;
  std::vector<double> empirical_moments;  // r = 1..R
  std::vector<double> standard_errors;
  std::vector<double> gaussian_targets;
  double ks_statistic = 0.0;
  Histogram histogram;
};

/// Per-norm data shared by all members: ideals, local measures, and for the
/// indicator statistic the CDF values at the interval ends.
class Ensemble {
 public:
  explicit Ensemble(EnsembleConfig config);

  const EnsembleConfig& config() const { return config_; }
  const std::vector<number_field::PrimeIdeal>& ideals() const { return ideals_; }
  const measures::LocalMeasure& measure(std::size_t ideal_index) const;

  /// N_I or the smooth sum for one member; a pure function of (seed, member).
  double member_statistic(std::int64_t member) const;
  /// Angles of one member, one per ideal, in enumeration order.
  std::vector<double> member_angles(std::int64_t member) const;

  double center() const;
  double scale() const;
  double standardize(double value) const { return (value - center()) / scale(); }
  double model_mean() const;
  double model_variance() const;

 private:
  EnsembleConfig config_;
  std::vector<number_field::PrimeIdeal> ideals_;
  std::vector<measures::LocalMeasure> distinct_;
  std::vector<std::size_t> measure_of_;
  std::vector<double> lo_;  // cdf(a) per ideal
  std::vector<double> hi_;  // cdf(b) per ideal
  double mu_ = 0.0;
  double smooth_mean_ = 0.0;
  double smooth_var_ = 0.0;
};

/// (value - pi_L mu(I)) / sqrt(pi_L (mu(I) - mu(I)^2)).
/// Throws ConfigError if mu(I) is 0 or 1.
double standardize(double value, std::int64_t pi_L, const ArcInterval& I);

/// E[Z^r] for standard normal Z.
double gaussian_moment(int r);

/// sum over m of Phi(M (t + m)).
double smooth_weight(const SmoothSpec& spec, double M, double t);

struct SmoothMoments {
  double mean;    // int_0^1 phi_M dmu
  double second;  // int_0^1 phi_M^2 dmu
  double variance;
};
/// Moments of phi_M under the Sato-Tate measure carried to [0, 1]
/// (density 2 sin^2(pi t)) or, if q is given, under the local measure.
SmoothMoments smooth_moments(const SmoothSpec& spec, double M,
                             std::optional<double> q = std::nullopt, int panels = 1 << 14);

/// Statistics of H members; threads <= 0 uses the OpenMP default.
std::vector<double> member_statistics_serial(const Ensemble& ens);
std::vector<double> member_statistics_parallel(const Ensemble& ens, int threads);

/// Moments, jackknife errors, KS distance and histogram of the standardized
/// member statistics. Bit-identical for any thread count.
MomentReport run_ensemble(const EnsembleConfig& config, int threads = 0);
MomentReport summarize(const Ensemble& ens, const std::vector<double>& stats);

struct TraceCheck {
  double empirical = 0.0;
  double target = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

/// Ensemble average of prod_i U_{m_i}(cos theta(P_i)) against the product of
/// local Chebyshev moments. Uses config.H and config.seed only.
/// Throws ConfigError on repeated ideals or mismatched lengths.
TraceCheck trace_identity_check(const EnsembleConfig& config,
                                const std::vector<number_field::PrimeIdeal>& ideals,
                                const std::vector<int>& ms, int threads = 0);

}  // namespace satolab::ensemble
