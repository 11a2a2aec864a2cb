#pragma once

#include <cstdint>
#include <string>
#include <vector>

/// Prime ideals of Q and of real quadratic fields Q(sqrt D), ordered by norm.
namespace satolab::number_field {

enum class FieldKind { rationals, real_quadratic };

struct FieldSpec {
  FieldKind kind = FieldKind::rationals;
  std::int64_t D = 1;

  static FieldSpec rationals() { return {}; }
  /// Throws ConfigError unless D > 1 is squarefree.
  static FieldSpec real_quadratic(std::int64_t D);
  /// Accepts "Q", "rationals", "sqrtD" (e.g. "sqrt5").
  static FieldSpec parse(const std::string& name);
  /// Rejects degree >= 3 with ConfigError; this is where higher-degree
  /// fields would plug in.
  static FieldSpec of_degree(int degree, std::int64_t D = 1);

  int degree() const { return kind == FieldKind::rationals ? 1 : 2; }
  /// D if D = 1 mod 4, else 4D; 1 for the rationals.
  std::int64_t discriminant() const;
  std::string name() const;
};

enum class SplitType { rational, split, inert, ramified };
const char* to_string(SplitType t);

struct PrimeIdeal {
  std::uint64_t p = 0;
  int f = 1;
  std::uint64_t norm = 0;
  SplitType type = SplitType::rational;
  /// 0 or 1 to tell apart the two ideals above a split prime; 0 otherwise.
  int label = 0;

  friend bool operator==(const PrimeIdeal&, const PrimeIdeal&) = default;
};

/// Ideals dividing the level; they are left out of every enumeration.
struct LevelSpec {
  std::vector<PrimeIdeal> excluded;
  bool squarefree = true;

  /// Throws ConfigError on repeated entries.
  void validate() const;
  bool excludes(const PrimeIdeal& P) const;
};

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Kronecker symbol (a / n) for n >= 1.
int kronecker(std::int64_t a, std::uint64_t n);

/// Primes <= limit by a segmented sieve of Eratosthenes.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Ideals above the rational prime p. Throws ConfigError if p is not prime.
std::vector<PrimeIdeal> split_prime(const FieldSpec& field, std::uint64_t p);

/// All prime ideals of norm <= x not excluded by the level, sorted by
/// (norm, p, label).
std::vector<PrimeIdeal> enumerate_prime_ideals(const FieldSpec& field, double x,
                                               const LevelSpec& level = {});

/// sum of 1 / N(P) over N(P) <= x.
double mertens_sum(const FieldSpec& field, double x);
/// sum over r >= 2 of N(P)^{-r}, i.e. sum of 1 / (N(P) (N(P) - 1)), over N(P) <= x.
double higher_power_sum(const FieldSpec& field, double x);

/// Same sums over an already enumerated list.
double mertens_sum(const std::vector<PrimeIdeal>& ideals);
double higher_power_sum(const std::vector<PrimeIdeal>& ideals);

}  // namespace satolab::number_field
