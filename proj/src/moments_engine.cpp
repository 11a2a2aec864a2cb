#include "satolab/moments_engine.hpp"

#include <algorithm>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "satolab/ensemble.hpp"
#include "satolab/error.hpp"
#include "satolab/numeric.hpp"

namespace satolab::moments {

namespace {

constexpr double kLocalCutoff = 1e-20;
constexpr double kEnumerationLimit = 1e7;
constexpr double kBudgetLimit = 1e-3;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void partitions_rec(int remaining, int max_part, std::vector<int>& cur, std::vector<Partition>& out) {
  if (remaining == 0) {
    Partition p;
    p.parts = cur;
    out.push_back(std::move(p));
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

// Calls fn(blocks) for every set partition of {0..u-1}, blocks given as bit masks.
template <class Fn>
void for_each_set_partition(int u, Fn&& fn) {
  std::vector<int> label(static_cast<std::size_t>(u), 0);
  std::vector<unsigned> blocks;
  std::vector<int> max_before(static_cast<std::size_t>(u), 0);
  while (true) {
    int nblocks = 0;
    for (int i = 0; i < u; ++i) nblocks = std::max(nblocks, label[static_cast<std::size_t>(i)] + 1);
    blocks.assign(static_cast<std::size_t>(nblocks), 0U);
    for (int i = 0; i < u; ++i) blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] |= 1U << i;
    fn(blocks);
    // Next restricted growth string: label[i] <= 1 + max(label[0..i-1]).
    int i = u - 1;
    while (i > 0) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, label[static_cast<std::size_t>(j)]);
      if (label[static_cast<std::size_t>(i)] <= mx) break;
      --i;
    }
    if (i <= 0) return;
    ++label[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < u; ++j) label[static_cast<std::size_t>(j)] = 0;
  }
}

}  // namespace

ZSeries ZSeries::from_pair(const selberg::ExtremalPair& pair, selberg::Sign sign) {
  if (!pair.arc) throw std::logic_error("ZSeries: pair has no Chebyshev expansion");
  std::vector<double> c(pair.f(sign).coeffs().begin(), pair.f(sign).coeffs().end());
  c[0] = 0.0;
  ZSeries z{chebyshev::Series(std::move(c)), sign};
  return z;
}

ZSeries ZSeries::from_coeffs(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs[0] != 0.0) {
    throw std::invalid_argument("ZSeries: the U_0 coefficient must be exactly 0");
  }
  return ZSeries{chebyshev::Series(std::move(coeffs)), selberg::Sign::plus};
}

chebyshev::Series z_power_coeffs(const ZSeries& z, int r) {
  if (r < 1) throw ConfigError("z_power_coeffs: r must be >= 1");
  if (static_cast<long>(r) * z.degree() > kPowerDegreeGuard) {
    throw ConfigError("z_power_coeffs: r * M = " + std::to_string(static_cast<long>(r) * z.degree()) +
                      " exceeds the guard 10000");
  }
  chebyshev::Series acc = z.series;
  for (int k = 2; k <= r; ++k) acc = chebyshev::product(acc, z.series);
  return acc;
}

double local_integral(const chebyshev::Series& f, double q) {
  if (!(q >= 2.0)) throw ConfigError("local_integral: norm q must be >= 2");
  const double step = 1.0 / q;
  double w = 1.0;
  double acc = 0.0;
  for (int m = 0; m <= f.degree() && w >= kLocalCutoff; m += 2) {
    acc += f[m] * w;
    w *= step;
  }
  return acc;
}

double integral_z_power_local(const ZSeries& z, int r, double q) {
  return local_integral(z_power_coeffs(z, r), q);
}

std::vector<Partition> partitions_of(int n) {
  if (n < 1 || n > 12) throw ConfigError("partitions_of: n must lie in 1..12");
  std::vector<Partition> out;
  std::vector<int> cur;
  partitions_rec(n, n, cur, out);
  const double nf = factorial(n);
  for (Partition& p : out) {
    double denom = 1.0;
    std::map<int, int> mult;
    for (int r : p.parts) {
      denom *= factorial(r);
      ++mult[r];
    }
    for (const auto& [r, c] : mult) denom *= factorial(c);
    p.weight = std::round(nf / denom);
    const bool all_two = std::all_of(p.parts.begin(), p.parts.end(), [](int r) { return r == 2; });
    const bool has_one = std::find(p.parts.begin(), p.parts.end(), 1) != p.parts.end();
    p.kind = all_two ? PartitionCase::all_twos
                     : (has_one ? PartitionCase::has_one : PartitionCase::has_large);
  }
  return out;
}

double distinct_tuple_sum(const std::vector<int>& parts, const std::vector<std::vector<double>>& v) {
  const int u = static_cast<int>(parts.size());
  if (u == 0) return 1.0;
  if (u > 12) throw ConfigError("distinct_tuple_sum: at most 12 parts");
  const std::size_t nmask = std::size_t{1} << u;
  // P[B] = sum_s prod_{i in B} v[s][parts[i]].
  std::vector<CompensatedSum> P(nmask);
  std::vector<double> prod(nmask);
  for (const auto& row : v) {
    prod[0] = 1.0;
    for (std::size_t B = 1; B < nmask; ++B) {
      const int low = __builtin_ctzll(B);
      prod[B] = prod[B & (B - 1)] * row.at(static_cast<std::size_t>(parts[static_cast<std::size_t>(low)]));
      P[B] += prod[B];
    }
  }
  CompensatedSum total;
  for_each_set_partition(u, [&](const std::vector<unsigned>& blocks) {
    double term = 1.0;
    for (unsigned B : blocks) {
      const int size = __builtin_popcount(B);
      term *= ((size % 2 == 1) ? 1.0 : -1.0) * factorial(size - 1) * P[B].value();
    }
    total += term;
  });
  return total.value();
}

double partition_expansion(int n, const std::vector<std::vector<double>>& v) {
  CompensatedSum acc;
  for (const Partition& p : partitions_of(n)) acc += p.weight * distinct_tuple_sum(p.parts, v);
  return acc.value();
}

MainTermReport moment_main_term(int n, const std::vector<number_field::PrimeIdeal>& ideals,
                                const selberg::ExtremalPair& pair, selberg::Sign sign) {
  if (n < 1 || n > 8) throw ConfigError("moment_main_term: n must lie in 1..8");
  if (ideals.empty()) throw ConfigError("moment_main_term: no prime ideals");
  const ZSeries z = ZSeries::from_pair(pair, sign);
  std::vector<chebyshev::Series> powers;
  for (int r = 1; r <= n; ++r) powers.push_back(z_power_coeffs(z, r));

  std::map<std::uint64_t, std::vector<double>> by_norm;
  std::vector<std::vector<double>> v;
  v.reserve(ideals.size());
  for (const auto& P : ideals) {
    auto it = by_norm.find(P.norm);
    if (it == by_norm.end()) {
      std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
      for (int r = 1; r <= n; ++r) {
        row[static_cast<std::size_t>(r)] =
            local_integral(powers[static_cast<std::size_t>(r) - 1], static_cast<double>(P.norm));
      }
      it = by_norm.emplace(P.norm, std::move(row)).first;
    }
    v.push_back(it->second);
  }

  MainTermReport rep;
  rep.n = n;
  rep.M = pair.degree;
  rep.pi_L = static_cast<std::int64_t>(ideals.size());
  const double norm = std::pow(static_cast<double>(ideals.size()), 0.5 * n);
  for (const Partition& p : partitions_of(n)) {
    const double c = p.weight * distinct_tuple_sum(p.parts, v) / norm;
    switch (p.kind) {
      case PartitionCase::all_twos:
        rep.case1 += c;
        break;
      case PartitionCase::has_one:
        rep.case2 += c;
        break;
      case PartitionCase::has_large:
        rep.case3 += c;
        break;
    }
  }
  rep.main_term = rep.case1 + rep.case2 + rep.case3;
  const auto vs = selberg::variance_sum(pair);
  rep.variance_sum = sign == selberg::Sign::plus ? vs.plus : vs.minus;
  rep.gaussian_target = ensemble::gaussian_moment(n) * std::pow(rep.variance_sum, 0.5 * n);
  rep.ratio = rep.gaussian_target != 0.0 ? rep.main_term / rep.gaussian_target : 0.0;
  return rep;
}

MainTermReport moment_main_term(int n, const number_field::FieldSpec& field, double x,
                                const selberg::ExtremalPair& pair, selberg::Sign sign) {
  return moment_main_term(n, number_field::enumerate_prime_ideals(field, x), pair, sign);
}

WeightVector WeightVector::from_integers(const std::vector<std::int64_t>& k) {
  if (k.empty()) throw ConfigError("weights: need at least one k_i");
  WeightVector w;
  for (std::int64_t ki : k) {
    if (ki < 4 || ki % 2 != 0) {
      throw ConfigError("weights: every k_i must be an even integer >= 4, got " + std::to_string(ki));
    }
    w.log_k.push_back(std::log(static_cast<double>(ki)));
  }
  return w;
}

WeightVector WeightVector::from_logs(std::vector<double> log_k) {
  if (log_k.empty()) throw ConfigError("weights: need at least one k_i");
  for (double l : log_k) {
    if (!std::isfinite(l) || l < std::log(4.0)) throw ConfigError("weights: log k_i must be >= log 4");
  }
  return WeightVector{std::move(log_k)};
}

double WeightVector::log_product() const {
  CompensatedSum s;
  for (double l : log_k) s += l;
  return s.value();
}

int clt_degree(std::int64_t pi_L, double x) {
  if (!(x > std::exp(1.0))) throw ConfigError("clt_degree: x must exceed e");
  return static_cast<int>(std::floor(std::sqrt(static_cast<double>(pi_L)) * std::log(std::log(x))));
}

GrowthReport growth_bookkeeping(const number_field::FieldSpec& field, double x,
                                const WeightVector& k, const number_field::LevelSpec& level,
                                int n) {
  if (!(x >= 16.0) || !std::isfinite(x)) throw ConfigError("growth: x must be >= 16");
  if (n < 1) throw ConfigError("growth: n must be >= 1");
  GrowthReport g;
  g.x = x;
  g.n = n;
  if (x <= kEnumerationLimit) {
    g.pi_L = static_cast<double>(number_field::enumerate_prime_ideals(field, x, level).size());
  } else {
    g.pi_L = boost::math::expint(std::log(x)) - boost::math::expint(std::log(2.0));
    g.pi_L_estimated = true;
  }
  const double loglog = std::log(std::log(x));
  g.M_clt = static_cast<std::int64_t>(std::floor(std::sqrt(g.pi_L) * loglog));
  const double d = field.degree();
  const double logx = std::log(x);
  g.M_first_moment_all = std::floor(2.0 * d * k.log_product() / (3.0 * logx));
  double drop_last = 0.0;
  for (std::size_t i = 0; i + 1 < k.log_k.size(); ++i) drop_last += k.log_k[i];
  g.M_first_moment_drop_last = std::floor(2.0 * d * drop_last / (3.0 * logx));
  for (const auto& P : level.excluded) g.level_norm *= static_cast<double>(P.norm);
  const double M = std::max<double>(1.0, static_cast<double>(g.M_clt));
  g.log_budget = 1.5 * M * logx - k.log_product() + 0.5 * n * std::log(g.pi_L) +
                 2.0 * n * std::log(M);
  g.budget = std::exp(g.log_budget);
  g.budget_ok = g.log_budget < std::log(kBudgetLimit);
  return g;
}

}  // namespace satolab::moments
