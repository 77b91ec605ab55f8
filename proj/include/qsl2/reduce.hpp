#pragma once

// Equivalence-chain engine.  A PairState carries a det-1 matrix whose first
// row is the pair being reduced; every move multiplies it on the left and/or
// right by registry factors and records them, so the chain can be unwound
// into a certificate for the starting matrix.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsl2/families.hpp"
#include "qsl2/primes.hpp"

namespace qsl2 {

struct PipelineConfig {
  PrimeConfig primes;
  /// Number of candidate primes c compared before committing to one.
  std::size_t ck_window = 12;
  /// Retries for failed root extractions and degenerate completions.
  int max_retries = 8;
  /// Candidate primes q compared when making the first coordinate an m-th power.
  std::size_t mth_window = 6;
  /// Largest exponent t accepted in the m-th power reduction.
  unsigned long max_exponent = 400;
  /// Re-check every step product (cheap; on by default).
  bool check_steps = true;
  std::uint64_t seed = 1;
};

struct Step {
  std::vector<Factor> left, right;  // after = prod(left) * before * prod(right)
  Matrix2 after;
  std::string origin;
};

struct PairState {
  Matrix2 matrix;
  std::vector<Step> steps;

  explicit PairState(Matrix2 m) : matrix(std::move(m)) {}
  const RingElem& first() const { return matrix.a; }
  const RingElem& second() const { return matrix.b; }
};

struct ReduceStats {
  std::uint64_t trials = 0;        // candidates examined by prime searches
  unsigned long max_t = 0;         // largest exponent used in reduce_mth
  unsigned long reduce_b_calls = 0;
  unsigned long root_retries = 0;  // NotResidue retries in reduce_b
  unsigned long hilbert_checks = 0;
  unsigned long hilbert_contradictions = 0;
};

enum class Which { First, Second };

class Reducer {
 public:
  explicit Reducer(long d, PipelineConfig cfg = {});

  const RingDesc& ring() const { return R_; }
  const PipelineConfig& config() const { return cfg_; }
  const ReduceStats& stats() const { return stats_; }

  /// Multiply by prod(left) on the left and prod(right) on the right.
  void apply(PairState& st, std::vector<Factor> left, std::vector<Factor> right, const std::string& origin);

  /// First: (a + b t, b) via E21(t); second: (a, b + a t) via E12(t).
  void pair_shift(PairState& st, Which which, const RingElem& t, const std::string& origin = "shift");

  /// (1+ab, b^2 c) -> (1+ab, c).
  void reduce_square(PairState& st, const RingElem& a, const RingElem& b, const RingElem& c);
  /// (1+ab, bc) -> (1+ab, c).
  void reduce_b(PairState& st, const RingElem& a, const RingElem& b, const RingElem& c);
  /// (a^n, b) -> first row of alpha^n, where alpha has first row (a, b).
  void reduce_power(PairState& st, const Matrix2& alpha, unsigned long n);

  /// Prime c with b c == u mod (aa) and gcd(eps(b), eps(c)) == m * gamma.
  RingElem ck_lemma4_search(const RingElem& aa, const RingElem& b, const RingElem& u, const Int& gamma = 1);
  /// (a^m, b) -> (1, 0) for prime b.
  void reduce_mth(PairState& st, const RingElem& a, const RingElem& b);
  /// (s, t) -> (a^m, q) with q prime; returns a.
  RingElem make_mth_power(PairState& st);
  /// Zero or unit coordinate: reduce to (1, 0).  False if not degenerate.
  bool normalize_degenerate(PairState& st);
  /// Euclidean-style shifts while they shrink the pair without creating a
  /// zero or unit coordinate; leaves the smaller-norm coordinate first.
  void shrink(PairState& st);

  void factorize_row(PairState& st);
  Certificate factorize_matrix(const Matrix2& m);

  /// Word whose product is the net transform of st: prod(word_left) * start * prod(word_right).
  static std::vector<Factor> left_word(const PairState& st);
  static std::vector<Factor> right_word(const PairState& st);

 private:
  struct MthPlan {
    RingElem c;
    unsigned long t = 0, s = 0;
    double cost = 0;
  };

  RingElem el(const Int& x, const Int& y = 0) const { return RingElem(x, y, R_.d); }
  void expect_row(const PairState& st, const RingElem& x, const RingElem& y, const char* where) const;
  /// Runs `move` on a scratch state with first row (x, y) and applies the
  /// inverse chain to st, whose first row must equal the scratch result.
  template <class Move>
  void apply_reversed(PairState& st, const RingElem& x, const RingElem& y, Move&& move, const std::string& origin);
  std::vector<Factor> power_word(const Matrix2& alpha, const RingElem& a, const RingElem& b, unsigned long n,
                                 const std::string& origin);
  void diag_unit_to_one(PairState& st);
  unsigned long plan_exponent(const Int& eb, const Int& ec) const;
  /// Cheapest c (by t * bits(N(trace))) among a window, or none below `bound`.
  std::optional<MthPlan> plan_mth(const RingElem& a, const RingElem& b, double bound = 1e300);

  RingDesc R_;
  PipelineConfig cfg_;
  ReduceStats stats_;
};

/// Inverse of a word: reversed, each factor inverted.
std::vector<Factor> invert_word(const std::vector<Factor>& word);
/// Merge adjacent factors of one family, fold integral elementary factors into
/// neighbouring ZWORDs and drop identities.  The product is unchanged.
std::vector<Factor> simplify_word(std::vector<Factor> word, long d);

}  // namespace qsl2
