#pragma once

#include <cstdint>
#include <vector>

#include "satolab/chebyshev.hpp"
#include "satolab/number_field.hpp"
#include "satolab/selberg.hpp"

/// Deterministic moment pipeline: powers of the centered statistic Z_M in the
/// U_m basis, their local integrals, and the partition expansion of moments
/// of a sum over prime ideals.
namespace satolab::moments {

/// sum_{m=1}^{M} F(m) U_m(cos theta): the extremal expansion with its
/// constant term removed.
struct ZSeries {
  chebyshev::Series series;
  selberg::Sign source = selberg::Sign::plus;

  static ZSeries from_pair(const selberg::ExtremalPair& pair, selberg::Sign sign);
  /// Throws std::invalid_argument unless coeffs[0] == 0.
  static ZSeries from_coeffs(std::vector<double> coeffs);
  int degree() const { return series.degree(); }
};

/// Largest r * M accepted by z_power_coeffs.
inline constexpr int kPowerDegreeGuard = 10000;

/// Exact U_m coefficients of Z^r. Throws ConfigError if r < 1 or r*M > 1e4.
chebyshev::Series z_power_coeffs(const ZSeries& z, int r);

/// int f dmu at norm q for an expansion f: sum over even m of c_m q^{-m/2},
/// stopping once q^{-m/2} < 1e-20.
double local_integral(const chebyshev::Series& f, double q);
/// int Z^r dmu at norm q.
double integral_z_power_local(const ZSeries& z, int r, double q);

enum class PartitionCase { all_twos = 1, has_one = 2, has_large = 3 };

struct Partition {
  std::vector<int> parts;  // non-increasing
  /// n! / (prod r_i! prod mult_j!): the number of set partitions of an
  /// n-set with these block sizes.
  double weight = 0.0;
  PartitionCase kind = PartitionCase::has_large;
};

/// Integer partitions of n (1 <= n <= 12) in reverse lexicographic order.
std::vector<Partition> partitions_of(int n);

/// sum over ordered tuples of pairwise distinct sites (s_1..s_u) of
/// prod_i v[s_i][parts[i]], by Moebius inversion over set partitions of the
/// parts. v[s] must have an entry for every part size used.
double distinct_tuple_sum(const std::vector<int>& parts, const std::vector<std::vector<double>>& v);

/// sum over partitions of weight * distinct_tuple_sum: for v[s][r] = z_s^r
/// this is (sum_s z_s)^n.
double partition_expansion(int n, const std::vector<std::vector<double>>& v);

struct MainTermReport {
  int n = 0;
  int M = 0;
  std::int64_t pi_L = 0;
  double main_term = 0.0;  // already divided by pi_L^{n/2}
  double variance_sum = 0.0;
  double gaussian_target = 0.0;  // gaussian_moment(n) * variance_sum^{n/2}
  double ratio = 0.0;            // main_term / gaussian_target (even n)
  double case1 = 0.0;
  double case2 = 0.0;
  double case3 = 0.0;
};

/// Main term of the n-th moment of sum_P Z(theta_P) over ideals of norm <= x,
/// normalized by pi_L(x)^{n/2}, with a per-case breakdown. Requires n <= 8.
MainTermReport moment_main_term(int n, const std::vector<number_field::PrimeIdeal>& ideals,
                                const selberg::ExtremalPair& pair,
                                selberg::Sign sign = selberg::Sign::plus);
MainTermReport moment_main_term(int n, const number_field::FieldSpec& field, double x,
                                const selberg::ExtremalPair& pair,
                                selberg::Sign sign = selberg::Sign::plus);

/// Weights k_1..k_d stored as logarithms so astronomically large weights can
/// be described.
struct WeightVector {
  std::vector<double> log_k;

  /// Throws ConfigError unless every k is even and >= 4.
  static WeightVector from_integers(const std::vector<std::int64_t>& k);
  /// Throws ConfigError unless every log k >= log 4.
  static WeightVector from_logs(std::vector<double> log_k);
  double log_product() const;
};

struct GrowthReport {
  double x = 0.0;
  double pi_L = 0.0;
  bool pi_L_estimated = false;  // logarithmic-integral estimate for large x
  /// floor(sqrt(pi_L) log log x).
  std::int64_t M_clt = 0;
  /// floor(2 d sum log k_i / (3 log x)) summed over i = 1..d and over i = 1..d-1.
  double M_first_moment_all = 0.0;
  double M_first_moment_drop_last = 0.0;
  int n = 0;
  double level_norm = 1.0;
  /// log of x^{3M/2} (prod k_i)^{-1} pi_L^{n/2} M^{2n} with M = M_clt.
  double log_budget = 0.0;
  double budget = 0.0;
  bool budget_ok = false;  // budget < 1e-3
};

/// Prime ideals are enumerated for x <= 1e7 and estimated by li(x) above.
GrowthReport growth_bookkeeping(const number_field::FieldSpec& field, double x,
                                const WeightVector& k, const number_field::LevelSpec& level,
                                int n);

/// floor(sqrt(pi_L) log log x).
int clt_degree(std::int64_t pi_L, double x);

}  // namespace satolab::moments
