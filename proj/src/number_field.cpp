#include "satolab/number_field.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "satolab/error.hpp"
#include "satolab/numeric.hpp"

namespace satolab::number_field {

namespace {

constexpr std::uint64_t kSieveCapacity = 100'000'000;

__extension__ using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e > 0) {
    if (e & 1U) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1U;
  }
  return r;
}

bool squarefree(std::int64_t n) {
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % (d * d) == 0) return false;
  }
  return true;
}

std::uint64_t norm_limit(double x) {
  if (!std::isfinite(x) || x < 2.0) throw ConfigError("norm bound x must be >= 2");
  if (x > static_cast<double>(kSieveCapacity)) {
    throw ConfigError("norm bound x exceeds the sieve capacity 1e8");
  }
  return static_cast<std::uint64_t>(std::floor(x));
}

}  // namespace

FieldSpec FieldSpec::real_quadratic(std::int64_t D) {
  if (D <= 1 || !squarefree(D)) {
    throw ConfigError("field.D must be a squarefree integer > 1, got " + std::to_string(D));
  }
  FieldSpec f;
  f.kind = FieldKind::real_quadratic;
  f.D = D;
  return f;
}

FieldSpec FieldSpec::parse(const std::string& name) {
  if (name == "Q" || name == "rationals" || name == "QQ") return rationals();
  if (name.rfind("sqrt", 0) == 0 && name.size() > 4) {
    const std::string digits = name.substr(4);
    if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
        digits.size() <= 15) {
      return real_quadratic(std::stoll(digits));
    }
  }
  throw ConfigError("field: expected 'Q' or 'sqrtD', got '" + name + "'");
}

FieldSpec FieldSpec::of_degree(int degree, std::int64_t D) {
  if (degree == 1) return rationals();
  if (degree == 2) return real_quadratic(D);
  throw ConfigError("field.degree " + std::to_string(degree) +
                    " is not supported: only Q and real quadratic fields are implemented "
                    "(extension point: FieldSpec / split_prime)");
}

std::int64_t FieldSpec::discriminant() const {
  if (kind == FieldKind::rationals) return 1;
  return D % 4 == 1 ? D : 4 * D;
}

std::string FieldSpec::name() const {
  return kind == FieldKind::rationals ? "Q" : "sqrt" + std::to_string(D);
}

const char* to_string(SplitType t) {
  switch (t) {
    case SplitType::rational:
      return "rational";
    case SplitType::split:
      return "split";
    case SplitType::inert:
      return "inert";
    case SplitType::ramified:
      return "ramified";
  }
  return "?";
}

void LevelSpec::validate() const {
  for (std::size_t i = 0; i < excluded.size(); ++i) {
    for (std::size_t j = i + 1; j < excluded.size(); ++j) {
      if (excluded[i] == excluded[j]) throw ConfigError("level: repeated excluded prime ideal");
    }
  }
}

bool LevelSpec::excludes(const PrimeIdeal& P) const {
  return std::find(excluded.begin(), excluded.end(), P) != excluded.end();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL,
                          37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL,
                          37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

int kronecker(std::int64_t a, std::uint64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  // Factor out 2 from n: (a/2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8.
  while ((n & 1U) == 0) {
    n >>= 1U;
    const std::int64_t r = ((a % 8) + 8) % 8;
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol for odd n.
  std::uint64_t m = n;
  std::int64_t am = a % static_cast<std::int64_t>(m);
  if (am < 0) am += static_cast<std::int64_t>(m);
  auto b = static_cast<std::uint64_t>(am);
  while (b != 0) {
    while ((b & 1U) == 0) {
      b >>= 1U;
      const std::uint64_t r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(b, m);
    if (b % 4 == 3 && m % 4 == 3) result = -result;
    b %= m;
  }
  return m == 1 ? result : 0;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  if (limit > kSieveCapacity) throw ConfigError("primes_up_to: limit exceeds sieve capacity 1e8");
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<bool> small(root + 1, true);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = false;
  }
  constexpr std::uint64_t kSegment = 1U << 18;
  std::vector<char> seg(kSegment);
  for (std::uint64_t lo = 2; lo <= limit; lo += kSegment) {
    const std::uint64_t hi = std::min(lo + kSegment - 1, limit);
    std::fill(seg.begin(), seg.end(), 1);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (std::uint64_t n = lo; n <= hi; ++n) {
      if (seg[n - lo]) primes.push_back(n);
    }
  }
  return primes;
}

std::vector<PrimeIdeal> split_prime(const FieldSpec& field, std::uint64_t p) {
  if (!is_prime(p)) throw ConfigError("split_prime: " + std::to_string(p) + " is not prime");
  if (field.kind == FieldKind::rationals) return {{p, 1, p, SplitType::rational, 0}};
  switch (kronecker(field.discriminant(), p)) {
    case 1:
      return {{p, 1, p, SplitType::split, 0}, {p, 1, p, SplitType::split, 1}};
    case -1:
      return {{p, 2, p * p, SplitType::inert, 0}};
    default:
      return {{p, 1, p, SplitType::ramified, 0}};
  }
}

std::vector<PrimeIdeal> enumerate_prime_ideals(const FieldSpec& field, double x,
                                               const LevelSpec& level) {
  level.validate();
  const std::uint64_t limit = norm_limit(x);
  std::vector<PrimeIdeal> out;
  for (std::uint64_t p : primes_up_to(limit)) {
    for (const PrimeIdeal& P : split_prime(field, p)) {
      if (P.norm <= limit && !level.excludes(P)) out.push_back(P);
    }
  }
  std::sort(out.begin(), out.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
    return std::tie(a.norm, a.p, a.label) < std::tie(b.norm, b.p, b.label);
  });
  return out;
}

double mertens_sum(const std::vector<PrimeIdeal>& ideals) {
  CompensatedSum s;
  for (const PrimeIdeal& P : ideals) s += 1.0 / static_cast<double>(P.norm);
  return s.value();
}

double higher_power_sum(const std::vector<PrimeIdeal>& ideals) {
  CompensatedSum s;
  for (const PrimeIdeal& P : ideals) {
    const double n = static_cast<double>(P.norm);
    s += 1.0 / (n * (n - 1.0));
  }
  return s.value();
}

double mertens_sum(const FieldSpec& field, double x) {
  return mertens_sum(enumerate_prime_ideals(field, x));
}

double higher_power_sum(const FieldSpec& field, double x) {
  return higher_power_sum(enumerate_prime_ideals(field, x));
}

}  // namespace satolab::number_field
