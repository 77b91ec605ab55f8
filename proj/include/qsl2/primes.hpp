#pragma once

// Primality and factorization of elements of O_d, unit-group exponents,
// prime searches in arithmetic progressions, and residue-field roots.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qsl2/ring.hpp"

namespace qsl2 {

struct PrimeConfig {
  int pseudoprime_rounds = 40;
  std::uint64_t search_budget = 200000;
  /// Largest local ring on which epsilon falls back to brute force.
  std::uint64_t brute_force_limit = 1000000;
};

/// Rational-integer primality: deterministic below 2^64, BPSW plus
/// `rounds` Miller-Rabin rounds above.
bool is_prime_int(const Int& n, int rounds = 40);

enum class PrimeTag { SplitDeg1, InertDeg2, Ramified, NotPrime };

struct PrimeKind {
  PrimeTag tag = PrimeTag::NotPrime;
  Int residue_char = 0;
  Int field_size = 0;  // |O/(q)| for prime q, 0 otherwise

  bool prime() const { return tag != PrimeTag::NotPrime; }
};

PrimeKind is_prime_elem(const RingElem& q, int rounds = 40);

/// Decomposition type of the rational prime p in O_d.
PrimeTag rational_prime_type(const RingDesc& R, const Int& p);

/// Generators of the prime ideals above the rational prime p (one or two).
/// Throws NonPrincipal when a prime ideal above p is not principal.
std::vector<RingElem> primes_above(const RingDesc& R, const Int& p);

/// Prime factorization of a positive integer (trial division + Pollard-Brent).
std::vector<std::pair<Int, int>> factor_int(const Int& n, int rounds = 40);

struct Factorization {
  RingElem unit;
  std::vector<std::pair<RingElem, int>> factors;
};

Factorization factor_elem(const RingDesc& R, const RingElem& q, int rounds = 40);

/// Exponent of (O/(q))^x.
Int epsilon(const RingDesc& R, const RingElem& q, const PrimeConfig& cfg = {});

/// Brute-force exponent of the unit group of a finite residue ring.
Int unit_group_exponent(const ResidueRing& rr);

struct PrimeConstraints {
  /// The prime must not divide any of these elements.
  std::vector<RingElem> avoid_divisors_of;
  /// gcd(residue characteristic, value) == 1.
  std::optional<Int> char_coprime_to;
  /// gcd(|O/(q)|, value) == 1.
  std::optional<Int> norm_coprime_to;
  /// |O/(q)| == 1 mod value.
  std::optional<Int> field_size_one_mod;
  /// Candidates to skip (used for retries).
  std::vector<RingElem> exclude;
  /// Arbitrary extra acceptance test.
  std::function<bool(const RingElem& q, const PrimeKind& kind)> extra;
};

struct HasseResult {
  RingElem n;
  RingElem q;
  PrimeKind kind;
  std::uint64_t trials = 0;
};

/// Enumerates O_d in canonical order: ascending norm, ties by (x, y).
class CanonicalEnumerator {
 public:
  explicit CanonicalEnumerator(long d) : d_(d) {}
  RingElem next();

 private:
  void refill();

  long d_;
  Int done_bound_ = -1;
  std::vector<RingElem> buffer_;
  std::size_t pos_ = 0;
};

/// First n in canonical order with q = base + modulus*n a prime element
/// satisfying the constraints.  Throws NotPrimitive or SearchExhausted.
HasseResult hasse_search(const RingDesc& R, const RingElem& base, const RingElem& modulus,
                         const PrimeConstraints& constraints, const PrimeConfig& cfg = {});

/// Up to `count` successive hits of hasse_search in canonical order; `trials`
/// is cumulative.  Throws SearchExhausted only when nothing is found.
std::vector<HasseResult> hasse_search_many(const RingDesc& R, const RingElem& base, const RingElem& modulus,
                                           const PrimeConstraints& constraints, std::size_t count,
                                           const PrimeConfig& cfg = {});

/// True iff s^((F-1)/m) == 1 in the residue field F of the prime q.
bool mth_power_residue(const RingElem& s, const RingElem& q, long m, int rounds = 40);

/// r with r^m == s mod (q), canonical residue.  Throws NotResidue.
RingElem mth_root_mod(const RingElem& s, const RingElem& q, long m, int rounds = 40);

/// Tame Hilbert symbol at an odd prime q.  Throws EvenPlace.
int hilbert_odd(const RingElem& alpha, const RingElem& beta, const RingElem& q, int rounds = 40);

}  // namespace qsl2
