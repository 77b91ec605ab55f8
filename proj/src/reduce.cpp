#include "qsl2/reduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "qsl2/error.hpp"

namespace qsl2 {

namespace {

Matrix2 product(const std::vector<Factor>& word, long d) {
  Matrix2 acc = Matrix2::identity(d);
  for (const auto& f : word) acc = acc * eval_factor(f);
  return acc;
}

bool is_rational_int(const RingElem& e) { return e.y == 0; }

bool is_one(const RingElem& e) { return e.x == 1 && e.y == 0; }

constexpr double kNoBound = 1e300;

bool degenerate_trace(const RingElem& tau) { return tau.y == 0 && abs(tau.x) <= 2; }

Matrix2 jprime(long d) { return Matrix2::from_ints(d, 0, 1, -1, 0); }
Matrix2 jsecond(long d) { return Matrix2::from_ints(d, 0, -1, 1, 0); }
Matrix2 minus_identity(long d) { return Matrix2::from_ints(d, -1, 0, 0, -1); }

Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace

std::vector<Factor> invert_word(const std::vector<Factor>& word) {
  std::vector<Factor> out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(inverse_of(*it));
  return out;
}

std::vector<Factor> simplify_word(std::vector<Factor> word, long d) {
  // integral elementary factors become ZWORDs so that they can merge
  auto as_zword = [d](const Factor& f) {
    return Factor::zword(f.family == Family::E12 ? Matrix2::from_ints(d, 1, f.params[0].x, 0, 1)
                                                 : Matrix2::from_ints(d, 1, 0, f.params[0].x, 1),
                         f.origin);
  };
  for (auto& f : word)
    if ((f.family == Family::E12 || f.family == Family::E21) && is_rational_int(f.params[0])) f = as_zword(f);

  // -I is central: pull every copy out and fold the parity into one ZWORD
  const Matrix2 minus = minus_identity(d);
  bool negate = false;
  std::vector<Factor> kept;
  for (auto& f : word) {
    if (f.family == Family::ZWORD && eval_factor(f) == minus) {
      negate = !negate;
      continue;
    }
    kept.push_back(std::move(f));
  }
  word = std::move(kept);
  if (negate) {
    auto z = std::find_if(word.begin(), word.end(), [](const Factor& f) { return f.family == Family::ZWORD; });
    if (z != word.end())
      z->zmatrix = eval_factor(*z) * minus, z->inverse = false;
    else
      word.push_back(Factor::zword(minus, "sign"));
  }

  auto is_identity = [](const Factor& f) {
    if (f.family == Family::E12 || f.family == Family::E21) return f.params[0].is_zero();
    if (f.family == Family::ZWORD) return eval_factor(f).is_identity();
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Factor> out;
    for (auto& f : word) {
      if (is_identity(f)) {
        changed = true;
        continue;
      }
      if (!out.empty()) {
        Factor& prev = out.back();
        if (prev.family == f.family && (f.family == Family::E12 || f.family == Family::E21)) {
          prev.params[0] = prev.params[0] + f.params[0];
          if (is_identity(prev)) out.pop_back();
          changed = true;
          continue;
        }
        if (prev.family == Family::ZWORD && f.family == Family::ZWORD) {
          prev.zmatrix = eval_factor(prev) * eval_factor(f);
          prev.inverse = false;
          if (is_identity(prev)) out.pop_back();
          changed = true;
          continue;
        }
      }
      out.push_back(std::move(f));
    }
    word = std::move(out);
  }
  // elementary-shaped ZWORDs read better as E12/E21
  for (auto& f : word) {
    if (f.family != Family::ZWORD) continue;
    const Matrix2 z = eval_factor(f);
    if (is_one(z.a) && is_one(z.d) && z.c.is_zero()) f = Factor::e12(z.b, f.origin);
    else if (is_one(z.a) && is_one(z.d) && z.b.is_zero()) f = Factor::e21(z.c, f.origin);
  }
  return word;
}

Reducer::Reducer(long d, PipelineConfig cfg) : R_(RingDesc::make(d)), cfg_(std::move(cfg)) {}

void Reducer::apply(PairState& st, std::vector<Factor> left, std::vector<Factor> right, const std::string& origin) {
  auto drop_identity = [](std::vector<Factor>& w) {
    w.erase(std::remove_if(w.begin(), w.end(),
                           [](const Factor& f) {
                             return (f.family == Family::E12 || f.family == Family::E21) && f.params[0].is_zero();
                           }),
            w.end());
  };
  drop_identity(left);
  drop_identity(right);
  if (left.empty() && right.empty()) return;
  for (auto& f : left)
    if (f.origin.empty()) f.origin = origin;
  for (auto& f : right)
    if (f.origin.empty()) f.origin = origin;
  Matrix2 after = product(left, R_.d) * st.matrix * product(right, R_.d);
  if (cfg_.check_steps && after.det() != el(1))
    fail(Errc::VerificationFailed, origin + ": step left SL2, det " + to_string(after.det()));
  st.matrix = after;
  st.steps.push_back({std::move(left), std::move(right), std::move(after), origin});
}

void Reducer::pair_shift(PairState& st, Which which, const RingElem& t, const std::string& origin) {
  if (t.is_zero()) return;
  apply(st, {}, {which == Which::First ? Factor::e21(t) : Factor::e12(t)}, origin);
}

void Reducer::expect_row(const PairState& st, const RingElem& x, const RingElem& y, const char* where) const {
  if (st.matrix.a != x || st.matrix.b != y)
    fail(Errc::VerificationFailed, std::string(where) + ": expected row (" + to_string(x) + ", " + to_string(y) +
                                       "), have (" + to_string(st.matrix.a) + ", " + to_string(st.matrix.b) + ")");
}

std::vector<Factor> Reducer::left_word(const PairState& st) {
  std::vector<Factor> out;
  for (auto it = st.steps.rbegin(); it != st.steps.rend(); ++it) out.insert(out.end(), it->left.begin(), it->left.end());
  return out;
}

std::vector<Factor> Reducer::right_word(const PairState& st) {
  std::vector<Factor> out;
  for (const auto& s : st.steps) out.insert(out.end(), s.right.begin(), s.right.end());
  return out;
}

template <class Move>
void Reducer::apply_reversed(PairState& st, const RingElem& x, const RingElem& y, Move&& move,
                             const std::string& origin) {
  // scratch: Y = L X0 R with first row of X0 = (x, y); st = E21(r) Y
  PairState scratch(complete_row(x, y));
  move(scratch);
  const RingElem r = row_fixup(scratch.matrix, st.matrix);
  std::vector<Factor> left = invert_word(left_word(scratch));
  left.push_back(Factor::e21(-r));
  apply(st, std::move(left), invert_word(right_word(scratch)), origin);
  expect_row(st, x, y, origin.c_str());
}

void Reducer::reduce_square(PairState& st, const RingElem& a, const RingElem& b, const RingElem& c) {
  const RingElem A = el(1) + a * b;
  expect_row(st, A, b * b * c, "reduce_square");
  if (b * b * c == c) return;
  if (is_unit(A)) {
    pair_shift(st, Which::Second, (c - b * b * c) * unit_inverse(A), "square-unit");
    expect_row(st, A, c, "reduce_square");
    return;
  }
  const ResidueRing rr(A);
  const RingElem z1 = a, z2 = c, z5 = b;
  const RingElem z3 = rr.reduce(rr.invert(b * c) * a);
  const RingElem z4 = div_exact(b * c * z3 - a, A);
  if (!(z1 + z4 + z5 * (z1 * z4 - z2 * z3)).is_zero())
    fail(Errc::VerificationFailed, "reduce_square: constraint on (z1..z5) violated");
  const Matrix2 g1{A, b * b * c, z3, el(1) + b * z4};
  const RingElem r = row_fixup(g1, st.matrix);
  // G2^T = J' MAGIC^-1 G1 J''  with  G1 = E21(-r) * state
  apply(st,
        {Factor::zword(jprime(R_.d)), Factor::magic({z1, z2, z3, z4, z5}, true), Factor::e21(-r)},
        {Factor::zword(jsecond(R_.d))}, "square");
  expect_row(st, A, c, "reduce_square");
}

void Reducer::reduce_b(PairState& st, const RingElem& a, const RingElem& b, const RingElem& c) {
  const RingElem A = el(1) + a * b;
  expect_row(st, A, b * c, "reduce_b");
  if (b * c == c) return;
  if (is_unit(A)) {
    pair_shift(st, Which::Second, (c - b * c) * unit_inverse(A), "drop-b-unit");
    expect_row(st, A, c, "reduce_b");
    return;
  }
  ++stats_.reduce_b_calls;
  const PrimeConfig& pc = cfg_.primes;

  // (i) c' = c + A d prime, not dividing 2a
  PrimeConstraints c1;
  c1.char_coprime_to = Int(2);
  c1.extra = [&a](const RingElem& q, const PrimeKind&) { return !try_div(a, q); };
  const HasseResult h1 = hasse_search(R_, small_rep(c, A), A, c1, pc);
  stats_.trials += h1.trials;
  const RingElem cp = h1.q;
  const RingElem dd = div_exact(cp - c, A);
  pair_shift(st, Which::Second, b * dd, "drop-b");  // (A, b c')

  // (ii) a + c' e = 4 q with q prime over an odd rational prime
  const RingElem four = el(4);
  const ResidueRing r4(four);
  const RingElem e0 = r4.reduce(-a * r4.invert(cp));
  const RingElem q0 = div_exact(a + cp * e0, four);
  PrimeConstraints c2;
  c2.char_coprime_to = Int(2);
  const HasseResult h2 = hasse_search(R_, small_rep(q0, cp), cp, c2, pc);
  stats_.trials += h2.trials;
  const RingElem q = h2.q;
  const RingElem e = div_exact(four * q - a, cp);
  const RingElem a2 = four * q;
  pair_shift(st, Which::First, e, "drop-b");  // (1 + a2 b, b c')
  const RingElem A2 = el(1) + a2 * b;
  expect_row(st, A2, b * cp, "reduce_b");

  // (iii) p = c' + A2 f prime with p = 1 mod 8q; (iv) r^2 = -a2 mod p
  const RingElem eightq = el(8) * q;
  const RingElem x0 = crt_pair(eightq, el(1), A2, cp);
  const RingElem modp = eightq * A2;
  PrimeConstraints c3;
  RingElem p, r;
  for (int attempt = 0;; ++attempt) {
    const HasseResult h3 = hasse_search(R_, small_rep(x0, modp), modp, c3, pc);
    stats_.trials += h3.trials;
    p = h3.q;
    try {
      r = small_rep(mth_root_mod(-a2, p, 2, pc.pseudoprime_rounds), p);
      break;
    } catch (const Error& err) {
      if (err.code() != Errc::NotResidue || attempt + 1 >= cfg_.max_retries) throw;
      ++stats_.root_retries;
      c3.exclude.push_back(p);
    }
  }
  // reciprocity diagnostic: p = 1 mod 8 makes every dyadic symbol [-q, p] trivial,
  // so the odd places (only q and p can contribute) must multiply to 1
  ++stats_.hilbert_checks;
  const int hq = hilbert_odd(-q, p, q, pc.pseudoprime_rounds);
  const int hp = hilbert_odd(-q, p, p, pc.pseudoprime_rounds);
  if (hq * hp != 1 || hp != 1) ++stats_.hilbert_contradictions;

  const RingElem f = div_exact(p - cp, A2);
  pair_shift(st, Which::Second, b * f, "drop-b");  // (A2, b p)
  const RingElem k = div_exact(a2 + r * r, p);
  pair_shift(st, Which::First, -k, "drop-b");      // (1 - r^2 b, b p)
  pair_shift(st, Which::Second, -(b * p), "drop-b");  // (1 - r^2 b, r^2 b^2 p)
  reduce_square(st, -r, r * b, p);                // (1 - r^2 b, p)
  pair_shift(st, Which::First, k * b, "drop-b");   // (A2, p)
  pair_shift(st, Which::Second, -f, "drop-b");     // (A2, c')
  pair_shift(st, Which::First, -(e * b), "drop-b");  // (A, c')
  pair_shift(st, Which::Second, -dd, "drop-b");    // (A, c)
  expect_row(st, A, c, "reduce_b");
}

void Reducer::reduce_power(PairState& st, const Matrix2& alpha, unsigned long n) {
  if (n == 0) fail(Errc::Precondition, "reduce_power needs n >= 1");
  const RingElem& a = alpha.a;
  const RingElem& b = alpha.b;
  if (alpha.det() != el(1)) fail(Errc::Precondition, "reduce_power needs det 1");
  if (st.matrix.b != b) fail(Errc::Precondition, "reduce_power: second coordinate differs from alpha");
  if (n == 1) {
    expect_row(st, a, b, "reduce_power");
    return;
  }
  if (alpha.c.is_zero()) {
    // upper triangular, a a unit: a_n = a^n and only the second entry moves
    const Matrix2 an = pow(alpha, n);
    expect_row(st, an.a, b, "reduce_power");
    pair_shift(st, Which::Second, (an.b - b) * unit_inverse(an.a), "power");
    expect_row(st, an.a, an.b, "reduce_power");
    return;
  }
  const RingElem tau = a + alpha.d;
  if (degenerate_trace(tau)) fail(Errc::DegenerateTrace, "trace " + to_string(tau));
  const PowerRow row = power_first_row(alpha, n);
  const VWSplit vw = vw_split(tau, n);
  const RingElem& an = row.a_n;

  // a^n = a_n mod b: the matrix is upper triangular mod b
  pair_shift(st, Which::First, div_exact(an - st.matrix.a, b), "power");  // (a_n, b)
  const Factor minus = Factor::zword(minus_identity(R_.d), "power");
  apply(st, {minus}, {}, "power");                                       // (-a_n, -b)

  // (-a_n, -b) <- (-a_n, -b v) via reduce_b with -a_n = 1 + s' v
  const RingElem s1 = div_exact(-an - el(1), vw.v);
  apply_reversed(
      st, -an, -(b * vw.v), [&](PairState& s) { reduce_b(s, s1, vw.v, -b); }, "power");
  apply(st, {minus}, {}, "power");  // (a_n, b v)

  // (a_n, b v) <- (a_n, b v w) via reduce_b with a_n = 1 + s w
  const RingElem s2 = div_exact(an - el(1), vw.w);
  apply_reversed(
      st, an, b * vw.v * vw.w, [&](PairState& s) { reduce_b(s, s2, vw.w, b * vw.v); }, "power");
  expect_row(st, row.a_n, row.b_n, "reduce_power");
}

unsigned long Reducer::plan_exponent(const Int& eb, const Int& ec) const {
  // least t = eb k with t = m mod ec and s = t - m > 0
  const Int m = R_.m;
  const Int g = gcd(eb, ec);
  if (m % g != 0) return 0;
  const Int mod = ec / g;
  Int k0 = 1;
  if (mod > 1) {
    Int inv;
    const Int ebg = eb / g;
    mpz_invert(inv.get_mpz_t(), ebg.get_mpz_t(), mod.get_mpz_t());
    k0 = floor_mod((m / g) * inv, mod);
    if (k0 == 0) k0 = mod;
  }
  Int t = eb * k0;
  const Int step = lcm_int(eb, ec);
  while (t - m <= 0) t += step;
  if (t > cfg_.max_exponent) return 0;
  return t.get_ui();
}

RingElem Reducer::ck_lemma4_search(const RingElem& aa, const RingElem& b, const RingElem& u, const Int& gamma) {
  const PrimeKind kb = is_prime_elem(b, cfg_.primes.pseudoprime_rounds);
  if (!kb.prime()) fail(Errc::Precondition, "ck search: b is not prime");
  if (gcd(kb.residue_char, Int(R_.m)) != 1) fail(Errc::Precondition, "ck search: residue characteristic of b divides m");
  if (!coprime(aa, b)) fail(Errc::NotCoprime, "ck search: (a) + (b) != O");
  const Int eb = kb.field_size - 1;
  const Int target = gamma * R_.m;

  RingElem base = el(0);
  if (!is_unit(aa)) {
    const ResidueRing rr(aa);
    base = small_rep(rr.reduce(u * rr.invert(b)), aa);
  }
  PrimeConstraints cons;
  cons.extra = [&](const RingElem&, const PrimeKind& k) { return gcd(eb, k.field_size - 1) == target; };
  const auto hits = hasse_search_many(R_, base, is_unit(aa) ? el(1) : aa, cons, cfg_.ck_window, cfg_.primes);
  stats_.trials += hits.back().trials;
  const HasseResult* best = &hits.front();
  for (const auto& h : hits)
    if (h.kind.field_size < best->kind.field_size) best = &h;
  return best->q;
}

namespace {

/// Multiplicative order of a modulo (mod); a must be a unit there.
Int mult_order(const RingDesc& R, const RingElem& a, const RingElem& mod, int rounds) {
  if (is_unit(mod)) return 1;
  // |(O/(mod))^x| divides the product of p^k (p - 1) (p^2 - 1) over
  // p^k || N(mod), whatever the splitting; only rational factoring needed
  std::map<Int, int> primes;
  Int multiple = 1;
  auto add = [&](const Int& n) {
    if (n <= 1) return;
    for (const auto& [p, k] : factor_int(n, rounds)) primes[p] += k;
    multiple *= n;
  };
  for (const auto& [p, k] : factor_int(norm(mod), rounds)) {
    Int pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
    add(pk);
    add(p - 1);
    add(p - 1);
    add(p + 1);
  }
  const ResidueRing rr(mod);
  const RingElem one = rr.reduce(RingElem(1, 0, R.d));
  if (rr.pow(a, multiple) != one) fail(Errc::NotInvertible, "order of a non-unit");
  Int order = multiple;
  for (const auto& [p, k] : primes)
    for (int i = 0; i < k && rr.pow(a, order / p) == one; ++i) order /= p;
  return order;
}

}  // namespace

std::optional<Reducer::MthPlan> Reducer::plan_mth(const RingElem& a, const RingElem& b, double bound) {
  // N = [[a, b], [c, d']] needs b c = -1 mod a.  The exponents only have to
  // kill a modulo b and modulo c, so multiplicative orders replace eps.
  const int rounds = cfg_.primes.pseudoprime_rounds;
  const Int ob = mult_order(R_, a, b, rounds);
  RingElem base = el(0);
  if (!is_unit(a)) {
    const ResidueRing rr(a);
    base = small_rep(rr.reduce(-rr.invert(b)), a);
  }
  // t >= max(ord_b(a), m + 1) bounds the cost from below before any order mod c
  const double t_floor = std::max(ob.get_d(), static_cast<double>(R_.m + 1));
  if (t_floor > static_cast<double>(cfg_.max_exponent) || t_floor >= bound) return std::nullopt;
  std::optional<MthPlan> best;
  std::size_t found = 0;
  CanonicalEnumerator en(R_.d);
  for (std::uint64_t trials = 0; found < cfg_.ck_window && trials < 40 * cfg_.ck_window; ++trials) {
    const RingElem c = base + a * en.next();
    if (c.is_zero()) continue;
    const RingElem dprime = div_exact(el(1) + b * c, a);
    const RingElem tau = a + dprime;
    if (degenerate_trace(tau)) continue;
    const Int tn = norm(tau);
    const double bits = static_cast<double>(mpz_sizeinbase(tn.get_mpz_t(), 2));
    if (t_floor * bits >= std::min(bound, best ? best->cost : bound)) continue;
    const unsigned long t = plan_exponent(ob, mult_order(R_, a, c, rounds));
    if (t == 0) continue;
    ++found;
    const double cost = static_cast<double>(t) * bits;
    if (cost < bound && (!best || cost < best->cost)) best = MthPlan{c, t, t - static_cast<unsigned long>(R_.m), cost};
  }
  return best;
}

std::vector<Factor> Reducer::power_word(const Matrix2& alpha, const RingElem& a, const RingElem& b,
                                        unsigned long n, const std::string& origin) {
  // (1, 0) -> (1, b) -> (a^n, b) -> first row of alpha^n, then fix the second row
  PairState s(Matrix2::identity(R_.d));
  pair_shift(s, Which::Second, b, origin);
  pair_shift(s, Which::First, div_exact(pow(a, n) - el(1), b), origin);
  reduce_power(s, alpha, n);
  const Matrix2 target = pow(alpha, n);
  std::vector<Factor> word{Factor::e21(row_fixup(s.matrix, target), origin)};
  for (auto& f : left_word(s)) word.push_back(f);
  for (auto& f : right_word(s)) word.push_back(f);
  return word;
}

void Reducer::reduce_mth(PairState& st, const RingElem& a, const RingElem& b) {
  if (a.is_zero() || b.is_zero()) fail(Errc::Precondition, "reduce_mth needs ab != 0");
  const unsigned long m = static_cast<unsigned long>(R_.m);
  expect_row(st, pow(a, m), b, "reduce_mth");
  if (R_.class_number != 1)
    fail(Errc::NonPrincipal, "m-th power reduction is implemented for class number one only");

  const auto plan = plan_mth(a, b);
  if (!plan) fail(Errc::SearchExhausted, "no c with a usable exponent pair (t, s)");
  const RingElem& c = plan->c;
  const Matrix2 N{a, b, c, div_exact(el(1) + b * c, a)};
  stats_.max_t = std::max(stats_.max_t, plan->t);

  // N^m = N^t (J'' (N^T)^s J')
  std::vector<Factor> word = power_word(N, a, b, plan->t, "mth-power");
  word.push_back(Factor::zword(jsecond(R_.d), "mth-power"));
  for (auto& f : power_word(N.transpose(), a, c, plan->s, "mth-power")) word.push_back(f);
  word.push_back(Factor::zword(jprime(R_.d), "mth-power"));
  const Matrix2 Nm = pow(N, m);
  if (product(word, R_.d) != Nm) fail(Errc::VerificationFailed, "reduce_mth: word for N^m is wrong");

  // transport: (a^m, b) -> first row of N^m, then cancel N^m
  reduce_power(st, N, m);
  const RingElem r = row_fixup(Nm, st.matrix);
  std::vector<Factor> left = invert_word(word);
  left.push_back(Factor::e21(-r));
  apply(st, std::move(left), {}, "mth-power");
  if (!st.matrix.is_identity()) fail(Errc::VerificationFailed, "reduce_mth did not reach the identity");
}

RingElem Reducer::make_mth_power(PairState& st) {
  const RingElem s0 = st.matrix.a, t = st.matrix.b;
  if (s0.is_zero() || t.is_zero() || is_unit(s0)) fail(Errc::Precondition, "make_mth_power needs s t != 0, s non-unit");
  if (!coprime(s0, t)) fail(Errc::NotPrimitive, "pair is not primitive");
  const long m = R_.m;
  const int rounds = cfg_.primes.pseudoprime_rounds;
  const Int md = Int(m) * abs(Int(R_.disc));
  const auto us = units(R_);

  // m-th power reciprocity can rule out every q = t mod s at once; s is
  // then moved to a prime s' = s mod t and the bounded search repeated
  PrimeConstraints outer;
  outer.norm_coprime_to = md;
  PrimeConfig inner_cfg = cfg_.primes;
  inner_cfg.search_budget = std::min<std::uint64_t>(inner_cfg.search_budget, 4000);
  std::uint64_t spent = 0;
  for (int attempt = 0; attempt < 4 * cfg_.max_retries; ++attempt) {
    RingElem s = s0, k = el(0);
    if (attempt > 0) {
      const HasseResult hs = hasse_search(R_, s0, t, outer, cfg_.primes);
      spent += hs.trials;
      s = hs.q;
      k = hs.n;
    }
    PrimeConstraints cons;
    cons.field_size_one_mod = Int(m);
    cons.norm_coprime_to = md;
    cons.extra = [&](const RingElem& q, const PrimeKind&) { return mth_power_residue(s, q, m, rounds); };
    std::vector<HasseResult> hits;
    try {
      hits = hasse_search_many(R_, t, s, cons, cfg_.mth_window, inner_cfg);
    } catch (const Error& e) {
      if (e.code() != Errc::SearchExhausted) throw;
      spent += inner_cfg.search_budget;
      outer.exclude.push_back(s);
      continue;
    }
    stats_.trials += spent + hits.back().trials;
    // every q admits m roots a u (u a unit); keep the cheapest reduction plan
    const HasseResult* best = nullptr;
    RingElem best_a;
    double best_cost = 0;
    for (const auto& h : hits) {
      const RingElem a0 = mth_root_mod(s, h.q, m, rounds);
      for (const auto& u : us) {
        const RingElem a = small_rep(a0 * u, h.q);
        if (is_unit(a)) continue;
        const auto plan = plan_mth(a, h.q, best == nullptr ? kNoBound : best_cost);
        if (plan && (best == nullptr || plan->cost < best_cost)) {
          best = &h;
          best_a = a;
          best_cost = plan->cost;
        }
      }
    }
    if (best == nullptr) {
      outer.exclude.push_back(s);
      continue;
    }
    const RingElem& q = best->q;
    const RingElem& a = best_a;
    pair_shift(st, Which::First, k, "mth-power");                           // (s', t)
    pair_shift(st, Which::Second, best->n, "mth-power");                    // (s', q)
    pair_shift(st, Which::First, div_exact(pow(a, m) - s, q), "mth-power");  // (a^m, q)
    expect_row(st, pow(a, m), q, "make_mth_power");
    return a;
  }
  fail(Errc::SearchExhausted, "no prime q making the first coordinate an m-th power residue");
}

void Reducer::diag_unit_to_one(PairState& st) {
  // first row (u, 0), u a unit: multiply by diag(u^-1, u) on the left
  const RingElem u = st.matrix.a;
  if (is_one(u)) return;
  if (u == el(-1)) {
    apply(st, {Factor::zword(minus_identity(R_.d))}, {}, "unit");
  } else {
    const RingElem ui = unit_inverse(u);
    apply(st, {Factor::e12(ui), Factor::e21(-u), Factor::e12(ui), Factor::zword(jsecond(R_.d))}, {}, "unit");
  }
  expect_row(st, el(1), el(0), "normalize_degenerate");
}

bool Reducer::normalize_degenerate(PairState& st) {
  const RingElem x = st.matrix.a, y = st.matrix.b;
  if (is_unit(x)) {
    pair_shift(st, Which::Second, -(unit_inverse(x) * y), "unit");  // (x, 0)
  } else if (is_unit(y) || x.is_zero()) {
    if (!is_unit(y)) fail(Errc::NotPrimitive, "pair is not primitive");
    pair_shift(st, Which::First, -(x * unit_inverse(y)), "unit");   // (0, y)
    apply(st, {}, {Factor::zword(jsecond(R_.d))}, "unit");            // (y, 0)
  } else if (y.is_zero()) {
    fail(Errc::NotPrimitive, "pair is not primitive");
  } else {
    return false;
  }
  diag_unit_to_one(st);
  return true;
}

void Reducer::shrink(PairState& st) {
  // remainder of least norm >= 2 among quotients around the rounded one
  auto best_quotient = [](const RingElem& x, const RingElem& y) {
    const Int n = norm(y);
    const RingElem num = x * conj(y);
    const RingElem q0(round_div(num.x, n), round_div(num.y, n), x.d);
    std::optional<std::pair<RingElem, Int>> best;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        RingElem q(q0.x + dx, q0.y + dy, x.d);
        const Int nn = norm(x - q * y);
        if (nn <= 1) continue;
        if (!best || nn < best->second || (nn == best->second && canonical_less(q, best->first))) best = {q, nn};
      }
    return best;
  };
  // zero or unit coordinates would bypass the m-th power reduction entirely
  for (;;) {
    const RingElem &x = st.matrix.a, &y = st.matrix.b;
    const Int nx = norm(x), ny = norm(y);
    if (nx >= ny) {
      const auto q = best_quotient(x, y);
      if (!q || q->second >= nx) break;
      pair_shift(st, Which::First, -q->first, "shrink");
    } else {
      const auto q = best_quotient(y, x);
      if (!q || q->second >= ny) break;
      pair_shift(st, Which::Second, -q->first, "shrink");
    }
  }
  // (x, y) J'' = (y, -x)
  if (norm(st.matrix.a) > norm(st.matrix.b)) apply(st, {}, {Factor::zword(jsecond(R_.d))}, "shrink");
}

void Reducer::factorize_row(PairState& st) {
  if (st.matrix.a == el(1) && st.matrix.b.is_zero()) return;
  if (normalize_degenerate(st)) return;
  shrink(st);
  if (normalize_degenerate(st)) return;
  const RingElem a = make_mth_power(st);
  reduce_mth(st, a, st.matrix.b);
}

Certificate Reducer::factorize_matrix(const Matrix2& m) {
  if (m.det() != el(1)) fail(Errc::InvalidInput, "matrix does not have determinant 1");
  PairState st(m);
  factorize_row(st);
  // final = L m R with first row (1, 0), i.e. final = E21(z)
  const Matrix2& fin = st.matrix;
  if (!(is_one(fin.a) && fin.b.is_zero())) fail(Errc::VerificationFailed, "row reduction did not reach (1, 0)");
  std::vector<Factor> word = invert_word(left_word(st));
  word.push_back(Factor::e21(fin.c, "terminal"));
  for (auto& f : invert_word(right_word(st))) word.push_back(f);

  Certificate cert{R_.d, m, simplify_word(std::move(word), R_.d)};
  const VerifyReport rep = verify_certificate(cert);
  if (!rep.ok) fail(Errc::VerificationFailed, "certificate does not verify: " + rep.message);
  return cert;
}

}  // namespace qsl2
