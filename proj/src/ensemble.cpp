#include "satolab/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "satolab/chebyshev.hpp"
#include "satolab/error.hpp"
#include "satolab/numeric.hpp"
#include "satolab/rng.hpp"
#include "satolab/selberg.hpp"

namespace satolab::ensemble {

namespace {

constexpr double kTailTol = 1e-12;
constexpr int kHistogramBins = 60;
constexpr double kHistogramHalfWidth = 5.0;
constexpr int kModelPanels = 1 << 12;

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

void SmoothSpec::validate() const {
  if (kind == Kind::gaussian) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw ConfigError("smooth.lambda must be a positive number");
    }
    return;
  }
  if (table_u.size() < 2 || table_u.size() != table_phi.size()) {
    throw ConfigError("smooth.table: need at least two (u, phi) nodes of equal count");
  }
  if (table_u.front() != 0.0) throw ConfigError("smooth.table: first node must be u = 0");
  for (std::size_t i = 1; i < table_u.size(); ++i) {
    if (!(table_u[i] > table_u[i - 1])) throw ConfigError("smooth.table: u must increase");
  }
  for (double v : table_phi) {
    if (!std::isfinite(v)) throw ConfigError("smooth.table: phi values must be finite");
  }
}

double SmoothSpec::phi(double u) const {
  u = std::abs(u);
  if (kind == Kind::gaussian) return std::exp(-lambda * u * u);
  if (u >= table_u.back()) return 0.0;
  const auto it = std::upper_bound(table_u.begin(), table_u.end(), u);
  const auto i = static_cast<std::size_t>(it - table_u.begin()) - 1;
  const double w = (u - table_u[i]) / (table_u[i + 1] - table_u[i]);
  return table_phi[i] + w * (table_phi[i + 1] - table_phi[i]);
}

double SmoothSpec::cutoff() const {
  if (kind == Kind::custom) return table_u.back();
  // Past u0 the terms e^{-lambda u^2} at spacing >= 1 sum to less than
  // 2 e^{-lambda u0^2} / (1 - e^{-lambda}) ; make that < tol.
  const double slack = -std::log(kTailTol * (1.0 - std::exp(-lambda)) / 2.0);
  return std::sqrt(slack / lambda);
}

double smooth_weight(const SmoothSpec& spec, double M, double t) {
  if (!(M >= 1.0) || !std::isfinite(M)) throw ConfigError("smooth M must be >= 1");
  const double reach = spec.cutoff() / M + 1.0;
  const auto lo = static_cast<long>(std::floor(-t - reach));
  const auto hi = static_cast<long>(std::ceil(-t + reach));
  double acc = 0.0;
  for (long m = lo; m <= hi; ++m) acc += spec.phi(M * (t + static_cast<double>(m)));
  return acc;
}

SmoothMoments smooth_moments(const SmoothSpec& spec, double M, std::optional<double> q,
                             int panels) {
  std::optional<measures::LocalMeasure> local;
  if (q) local.emplace(*q);
  auto dens = [&](double theta) {
    if (local) return local->density(std::clamp(theta, 0.0, kPi));
    const double s = std::sin(theta);
    return 2.0 / kPi * s * s;
  };
  const double m1 = simpson(
      [&](double th) { return smooth_weight(spec, M, th / kPi) * dens(th); }, 0.0, kPi, panels);
  const double m2 = simpson(
      [&](double th) {
        const double w = smooth_weight(spec, M, th / kPi);
        return w * w * dens(th);
      },
      0.0, kPi, panels);
  return {m1, m2, m2 - m1 * m1};
}

void EnsembleConfig::validate() const {
  if (!std::isfinite(x) || x < 2.0) throw ConfigError("x must be >= 2");
  if (H < 1) throw ConfigError("H must be a positive integer");
  if (R < 1 || R > 12) throw ConfigError("R must lie in 1..12");
  level.validate();
  if (statistic == StatisticKind::smooth) {
    smooth.validate();
    if (!(smooth_M >= 1.0) || !std::isfinite(smooth_M)) throw ConfigError("smooth_M must be >= 1");
  }
}

Ensemble::Ensemble(EnsembleConfig config) : config_(std::move(config)) {
  config_.validate();
  ideals_ = number_field::enumerate_prime_ideals(config_.field, config_.x, config_.level);
  std::map<std::uint64_t, std::size_t> by_norm;
  measure_of_.reserve(ideals_.size());
  for (const auto& P : ideals_) {
    auto [it, fresh] = by_norm.try_emplace(P.norm, distinct_.size());
    if (fresh) distinct_.emplace_back(static_cast<double>(P.norm));
    measure_of_.push_back(it->second);
  }
  const ArcInterval& I = config_.interval;
  mu_ = selberg::mu_infty_interval(I);
  lo_.resize(ideals_.size());
  hi_.resize(ideals_.size());
  for (std::size_t i = 0; i < ideals_.size(); ++i) {
    lo_[i] = measure(i).cdf(I.a);
    hi_[i] = measure(i).cdf(I.b);
  }
  if (config_.statistic == StatisticKind::smooth) {
    const auto st = smooth_moments(config_.smooth, config_.smooth_M);
    smooth_mean_ = st.mean;
    smooth_var_ = st.variance;
    if (!(smooth_var_ > 0.0)) throw ConfigError("smooth statistic has zero variance");
  }
}

const measures::LocalMeasure& Ensemble::measure(std::size_t ideal_index) const {
  return distinct_[measure_of_.at(ideal_index)];
}

double Ensemble::member_statistic(std::int64_t member) const {
  const RngStream stream = RngStream::derive(config_.seed, static_cast<std::uint64_t>(member));
  const std::size_t n = ideals_.size();
  if (config_.statistic == StatisticKind::indicator) {
    // theta = F^{-1}(u) lies in [a, b] iff F(a) <= u <= F(b) for a strictly
    // increasing F, so the inversion itself is not needed.
    std::int64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = stream.uniform_at(i);
      count += (lo_[i] <= u && u <= hi_[i]) ? 1 : 0;
    }
    return static_cast<double>(count);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = measure(i).quantile(stream.uniform_at(i));
    acc += smooth_weight(config_.smooth, config_.smooth_M, theta / kPi);
  }
  return acc;
}

std::vector<double> Ensemble::member_angles(std::int64_t member) const {
  const RngStream stream = RngStream::derive(config_.seed, static_cast<std::uint64_t>(member));
  std::vector<double> out(ideals_.size());
  for (std::size_t i = 0; i < ideals_.size(); ++i) out[i] = measure(i).quantile(stream.uniform_at(i));
  return out;
}

double Ensemble::center() const {
  const auto n = static_cast<double>(ideals_.size());
  return config_.statistic == StatisticKind::indicator ? n * mu_ : n * smooth_mean_;
}

double Ensemble::scale() const {
  const auto n = static_cast<double>(ideals_.size());
  if (config_.statistic == StatisticKind::indicator && !(mu_ > 0.0 && mu_ < 1.0)) {
    throw ConfigError("interval has Sato-Tate mass 0 or 1; the statistic cannot be standardized");
  }
  return config_.statistic == StatisticKind::indicator ? std::sqrt(n * (mu_ - mu_ * mu_))
                                                       : std::sqrt(n * smooth_var_);
}

double Ensemble::model_mean() const {
  CompensatedSum s;
  if (config_.statistic == StatisticKind::indicator) {
    for (std::size_t i = 0; i < ideals_.size(); ++i) s += hi_[i] - lo_[i];
    return s.value();
  }
  std::vector<double> per(distinct_.size());
  for (std::size_t k = 0; k < distinct_.size(); ++k) {
    per[k] = smooth_moments(config_.smooth, config_.smooth_M, distinct_[k].q(), kModelPanels).mean;
  }
  for (std::size_t i = 0; i < ideals_.size(); ++i) s += per[measure_of_[i]];
  return s.value();
}

double Ensemble::model_variance() const {
  CompensatedSum s;
  if (config_.statistic == StatisticKind::indicator) {
    for (std::size_t i = 0; i < ideals_.size(); ++i) {
      const double m = hi_[i] - lo_[i];
      s += m * (1.0 - m);
    }
    return s.value();
  }
  std::vector<double> per(distinct_.size());
  for (std::size_t k = 0; k < distinct_.size(); ++k) {
    per[k] =
        smooth_moments(config_.smooth, config_.smooth_M, distinct_[k].q(), kModelPanels).variance;
  }
  for (std::size_t i = 0; i < ideals_.size(); ++i) s += per[measure_of_[i]];
  return s.value();
}

double standardize(double value, std::int64_t pi_L, const ArcInterval& I) {
  const double mu = selberg::mu_infty_interval(I);
  if (!(mu > 0.0 && mu < 1.0)) {
    throw ConfigError("interval has Sato-Tate mass 0 or 1; the statistic cannot be standardized");
  }
  const auto n = static_cast<double>(pi_L);
  return (value - n * mu) / std::sqrt(n * (mu - mu * mu));
}

double gaussian_moment(int r) {
  if (r < 0) throw std::invalid_argument("gaussian_moment: negative order");
  if (r % 2 != 0) return 0.0;
  double v = 1.0;
  for (int k = r - 1; k > 0; k -= 2) v *= k;  // (r-1)!!
  return v;
}

std::vector<double> member_statistics_serial(const Ensemble& ens) {
  const std::int64_t H = ens.config().H;
  std::vector<double> out(static_cast<std::size_t>(H));
  for (std::int64_t h = 0; h < H; ++h) out[static_cast<std::size_t>(h)] = ens.member_statistic(h);
  return out;
}

std::vector<double> member_statistics_parallel(const Ensemble& ens, int threads) {
  const std::int64_t H = ens.config().H;
  std::vector<double> out(static_cast<std::size_t>(H));
#pragma omp parallel for num_threads(resolve_threads(threads)) schedule(dynamic, 64)
  for (std::int64_t h = 0; h < H; ++h) out[static_cast<std::size_t>(h)] = ens.member_statistic(h);
  return out;
}

MomentReport summarize(const Ensemble& ens, const std::vector<double>& stats) {
  const auto& cfg = ens.config();
  MomentReport rep;
  rep.H = static_cast<std::int64_t>(stats.size());
  rep.pi_L_x = static_cast<std::int64_t>(ens.ideals().size());
  rep.center = ens.center();
  rep.scale = ens.scale();
  const auto Hd = static_cast<double>(stats.size());

  rep.raw_mean = pairwise_sum(stats) / Hd;
  std::vector<double> buf(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const double d = stats[i] - rep.raw_mean;
    buf[i] = d * d;
  }
  rep.raw_variance = stats.size() > 1 ? pairwise_sum(buf) / (Hd - 1.0) : 0.0;

  rep.mean_model = ens.model_mean();
  rep.variance_model = ens.model_variance();
  rep.mean_model_standardized = (rep.mean_model - rep.center) / rep.scale;
  rep.variance_model_standardized = rep.variance_model / (rep.scale * rep.scale);

  std::vector<double> z(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) z[i] = ens.standardize(stats[i]);

  for (int r = 1; r <= cfg.R; ++r) {
    for (std::size_t i = 0; i < z.size(); ++i) buf[i] = std::pow(z[i], r);
    const double m = pairwise_sum(buf) / Hd;
    // Jackknife of a sample mean: sqrt(sum (y_i - m)^2 / (H (H - 1))).
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double d = buf[i] - m;
      buf[i] = d * d;
    }
    const double se = stats.size() > 1 ? std::sqrt(pairwise_sum(buf) / (Hd * (Hd - 1.0))) : 0.0;
    rep.empirical_moments.push_back(m);
    rep.standard_errors.push_back(se);
    rep.gaussian_targets.push_back(gaussian_moment(r));
  }

  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = normal_cdf(sorted[i]);
    ks = std::max({ks, static_cast<double>(i + 1) / Hd - F, F - static_cast<double>(i) / Hd});
  }
  rep.ks_statistic = ks;

  Histogram& hist = rep.histogram;
  hist.counts.assign(kHistogramBins, 0);
  const double width = 2.0 * kHistogramHalfWidth / kHistogramBins;
  for (int k = 0; k <= kHistogramBins; ++k) hist.edges.push_back(-kHistogramHalfWidth + k * width);
  for (double v : z) {
    if (v < -kHistogramHalfWidth) {
      ++hist.underflow;
    } else if (v >= kHistogramHalfWidth) {
      ++hist.overflow;
    } else {
      auto k = static_cast<int>(std::floor((v + kHistogramHalfWidth) / width));
      k = std::clamp(k, 0, kHistogramBins - 1);
      ++hist.counts[static_cast<std::size_t>(k)];
    }
  }
  return rep;
}

MomentReport run_ensemble(const EnsembleConfig& config, int threads) {
  const Ensemble ens(config);
  (void)ens.scale();  // reject a degenerate interval before sampling
  const auto stats = threads == 1 ? member_statistics_serial(ens)
                                  : member_statistics_parallel(ens, threads);
  return summarize(ens, stats);
}

TraceCheck trace_identity_check(const EnsembleConfig& config,
                                const std::vector<number_field::PrimeIdeal>& ideals,
                                const std::vector<int>& ms, int threads) {
  if (ideals.size() != ms.size()) throw ConfigError("trace check: ideals and ms differ in length");
  for (std::size_t i = 0; i < ideals.size(); ++i) {
    if (ms[i] < 0) throw ConfigError("trace check: negative Chebyshev index");
    for (std::size_t j = i + 1; j < ideals.size(); ++j) {
      if (ideals[i] == ideals[j]) throw ConfigError("trace check: repeated prime ideal");
    }
  }
  if (config.H < 2) throw ConfigError("trace check: H must be >= 2");
  std::vector<measures::LocalMeasure> local;
  TraceCheck out;
  out.target = 1.0;
  for (std::size_t i = 0; i < ideals.size(); ++i) {
    local.emplace_back(static_cast<double>(ideals[i].norm));
    out.target *= local.back().chebyshev_moment(ms[i]);
  }
  const std::int64_t H = config.H;
  std::vector<double> vals(static_cast<std::size_t>(H));
#pragma omp parallel for num_threads(resolve_threads(threads)) schedule(static)
  for (std::int64_t h = 0; h < H; ++h) {
    const RngStream stream = RngStream::derive(config.seed, static_cast<std::uint64_t>(h));
    double prod = 1.0;
    for (std::size_t i = 0; i < local.size(); ++i) {
      prod *= chebyshev::eval_u(ms[i], local[i].quantile(stream.uniform_at(i)));
    }
    vals[static_cast<std::size_t>(h)] = prod;
  }
  const auto Hd = static_cast<double>(H);
  out.empirical = pairwise_sum(vals) / Hd;
  for (double& v : vals) v = (v - out.empirical) * (v - out.empirical);
  out.standard_error = std::sqrt(pairwise_sum(vals) / (Hd * (Hd - 1.0)));
  const double diff = out.empirical - out.target;
  out.z = out.standard_error > 0.0 ? diff / out.standard_error : (diff == 0.0 ? 0.0 : INFINITY);
  return out;
}

}  // namespace satolab::ensemble
