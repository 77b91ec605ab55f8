#include "qsl2/primes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qsl2 {

bool is_prime_int(const Int& n, int rounds) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), std::max(rounds, 1)) > 0;
}

PrimeTag rational_prime_type(const RingDesc& R, const Int& p) {
  if (p == 2) {
    if (!R.half_basis) return PrimeTag::Ramified;
    const long r = ((R.d % 8) + 8) % 8;
    return r == 1 ? PrimeTag::SplitDeg1 : PrimeTag::InertDeg2;
  }
  const Int dd(R.d);
  if (floor_mod(dd, p) == 0) return PrimeTag::Ramified;
  return mpz_legendre(dd.get_mpz_t(), p.get_mpz_t()) == 1 ? PrimeTag::SplitDeg1 : PrimeTag::InertDeg2;
}

PrimeKind is_prime_elem(const RingElem& q, int rounds) {
  PrimeKind out;
  const Int n = norm(q);
  if (n <= 1) return out;
  const RingDesc R = [&] {
    RingDesc r;
    r.d = q.d;
    r.half_basis = ((q.d % 4) + 4) % 4 == 1;
    r.disc = r.half_basis ? q.d : 4 * q.d;
    return r;
  }();
  if (is_prime_int(n, rounds)) {
    out.residue_char = n;
    out.field_size = n;
    out.tag = floor_mod(Int(R.disc), n) == 0 ? PrimeTag::Ramified : PrimeTag::SplitDeg1;
    return out;
  }
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return out;
  Int p = sqrt(n);
  if (!is_prime_int(p, rounds) || rational_prime_type(R, p) != PrimeTag::InertDeg2) return out;
  auto quotient = try_div(q, RingElem(p, 0, q.d));
  if (!quotient || !is_unit(*quotient)) return out;
  out.tag = PrimeTag::InertDeg2;
  out.residue_char = p;
  out.field_size = n;
  return out;
}

namespace {

// Square root of a modulo the odd prime p (Tonelli-Shanks); a must be a residue.
Int sqrt_mod_prime(const Int& a_in, const Int& p) {
  Int a = floor_mod(a_in, p);
  if (a == 0) return 0;
  if (mpz_legendre(a.get_mpz_t(), p.get_mpz_t()) != 1) fail(Errc::NotResidue, "no square root mod " + to_string(p));
  Int q = p - 1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q >>= 1;
    ++s;
  }
  Int z = 2;
  while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
  auto powm = [&](const Int& b, const Int& e) {
    Int r;
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r;
  };
  Int c = powm(z, q);
  Int x = powm(a, (q + 1) / 2);
  Int t = powm(a, q);
  unsigned long m = s;
  while (t != 1) {
    unsigned long i = 0;
    Int tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Int b = c;
    for (unsigned long j = 0; j + 1 < m - i; ++j) b = b * b % p;
    x = x * b % p;
    c = b * b % p;
    t = t * c % p;
    m = i;
  }
  return x;
}

Int pollard_brent(const Int& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Int y = 2, x, g = 1, q = 1, ys;
    unsigned long r = 1;
    const unsigned long m = 128;
    auto f = [&](const Int& v) -> Int { return (v * v + c) % n; };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = q * abs(x - y) % n;
        }
        g = gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(abs(x - ys), n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(const Int& n, std::map<Int, int>& out, int rounds) {
  if (n == 1) return;
  if (is_prime_int(n, rounds)) {
    ++out[n];
    return;
  }
  if (mpz_perfect_square_p(n.get_mpz_t()) != 0) {
    Int r = sqrt(n);
    factor_into(r, out, rounds);
    factor_into(r, out, rounds);
    return;
  }
  Int f = pollard_brent(n);
  factor_into(f, out, rounds);
  factor_into(n / f, out, rounds);
}

Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

}  // namespace

std::vector<std::pair<Int, int>> factor_int(const Int& n_in, int rounds) {
  if (n_in <= 0) fail(Errc::Precondition, "factor_int of non-positive integer");
  std::map<Int, int> out;
  Int n = n_in;
  for (unsigned long p = 2; p < 10000 && Int(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
      ++out[Int(p)];
      n /= p;
    }
  }
  factor_into(n, out, rounds);
  return {out.begin(), out.end()};
}

std::vector<RingElem> primes_above(const RingDesc& R, const Int& p) {
  const PrimeTag tag = rational_prime_type(R, p);
  if (tag == PrimeTag::InertDeg2) return {elem(R, p)};
  // root of the minimal polynomial of w modulo p
  Int root;
  const long k = (R.d - 1) / 4;
  if (p == 2) {
    for (int r = 0; r < 2; ++r) {
      const long f = R.half_basis ? r * r - r - k : r * r - R.d;
      if (f % 2 == 0) root = r;
    }
  } else {
    const Int s = sqrt_mod_prime(Int(R.d), p);
    if (R.half_basis) {
      Int inv2 = (p + 1) / 2;
      root = floor_mod((1 + s) * inv2, p);
    } else {
      root = s;
    }
  }
  const RingElem pi = ideal_generator(elem(R, p), omega(R) - elem(R, root));
  if (tag == PrimeTag::Ramified) return {pi};
  return {pi, ideal_generator(conj(pi), elem(R, 0))};
}

Factorization factor_elem(const RingDesc& R, const RingElem& q, int rounds) {
  if (q.is_zero()) fail(Errc::Precondition, "factor_elem(0)");
  Factorization out;
  RingElem cur = q;
  for (const auto& [p, e] : factor_int(norm(q), rounds)) {
    (void)e;
    for (const auto& pi : primes_above(R, p)) {
      int mult = 0;
      while (auto quotient = try_div(cur, pi)) {
        cur = *quotient;
        ++mult;
      }
      if (mult > 0) out.factors.emplace_back(pi, mult);
    }
  }
  if (!is_unit(cur)) fail(Errc::Precondition, "factor_elem left a non-unit cofactor " + to_string(cur));
  out.unit = cur;
  RingElem check = out.unit;
  for (const auto& [pi, mult] : out.factors) check = check * pow(pi, static_cast<unsigned long>(mult));
  if (check != q) fail(Errc::Precondition, "factor_elem round trip failed");
  return out;
}

Int unit_group_exponent(const ResidueRing& rr) {
  const Int size = rr.size();
  const RingElem q = rr.modulus();
  std::vector<RingElem> group;
  for (Int i = 0; i < size; ++i) {
    RingElem e = rr.element(i);
    if (!e.is_zero() && coprime(e, q)) group.push_back(e);
    if (e.is_zero() && is_unit(q)) group.push_back(e);
  }
  const Int order = Int(static_cast<unsigned long>(group.size()));
  if (order <= 1) return 1;
  Int exponent = order;
  const RingElem one = rr.reduce(RingElem(1, 0, q.d));
  for (const auto& [r, mult] : factor_int(order)) {
    (void)mult;
    while (exponent % r == 0) {
      const Int trial = exponent / r;
      bool all = std::all_of(group.begin(), group.end(), [&](const RingElem& x) { return rr.pow(x, trial) == one; });
      if (!all) break;
      exponent = trial;
    }
  }
  return exponent;
}

Int epsilon(const RingDesc& R, const RingElem& q, const PrimeConfig& cfg) {
  if (q.is_zero() || is_unit(q)) fail(Errc::Precondition, "epsilon needs a non-zero non-unit");
  const PrimeKind kind = is_prime_elem(q, cfg.pseudoprime_rounds);
  if (kind.prime()) return kind.field_size - 1;
  const Factorization fac = factor_elem(R, q, cfg.pseudoprime_rounds);
  Int result = 1;
  for (const auto& [pi, mult] : fac.factors) {
    const Int field = is_prime_elem(pi, cfg.pseudoprime_rounds).field_size;
    if (mult == 1) {
      result = lcm_int(result, field - 1);
      continue;
    }
    const RingElem power = pow(pi, static_cast<unsigned long>(mult));
    const ResidueRing local(power);
    if (local.size() > Int(static_cast<unsigned long>(cfg.brute_force_limit)))
      fail(Errc::TooLarge, "local ring of size " + to_string(local.size()));
    result = lcm_int(result, unit_group_exponent(local));
  }
  return result;
}

RingElem CanonicalEnumerator::next() {
  while (pos_ >= buffer_.size()) refill();
  return buffer_[pos_++];
}

void CanonicalEnumerator::refill() {
  const Int lo = done_bound_;
  const Int hi = lo < 4 ? Int(4) : Int(2 * lo);
  buffer_.clear();
  pos_ = 0;
  const bool half = ((d_ % 4) + 4) % 4 == 1;
  const double H = hi.get_d();
  const long ad = -d_;
  // norm >= |d| y^2 / 4 in both bases
  const long ymax = static_cast<long>(std::sqrt(4.0 * H / static_cast<double>(ad))) + 1;
  for (long y = -ymax; y <= ymax; ++y) {
    const long xmax = static_cast<long>(std::sqrt(H)) + std::labs(y) + 1;
    for (long x = -xmax; x <= xmax; ++x) {
      RingElem e(x, y, d_);
      (void)half;
      const Int n = norm(e);
      if (n > lo && n <= hi) buffer_.push_back(std::move(e));
    }
  }
  std::sort(buffer_.begin(), buffer_.end(), canonical_less);
  done_bound_ = hi;
}

namespace {

bool satisfies(const RingElem& q, const PrimeKind& kind, const PrimeConstraints& c) {
  for (const auto& e : c.avoid_divisors_of) {
    if (!e.is_zero() && try_div(e, q)) return false;
  }
  if (c.char_coprime_to && gcd(kind.residue_char, *c.char_coprime_to) != 1) return false;
  if (c.norm_coprime_to && gcd(kind.field_size, *c.norm_coprime_to) != 1) return false;
  if (c.field_size_one_mod && floor_mod(kind.field_size, *c.field_size_one_mod) != floor_mod(Int(1), *c.field_size_one_mod))
    return false;
  if (c.extra && !c.extra(q, kind)) return false;
  return true;
}

}  // namespace

std::vector<HasseResult> hasse_search_many(const RingDesc& R, const RingElem& base, const RingElem& modulus,
                                           const PrimeConstraints& constraints, std::size_t count,
                                           const PrimeConfig& cfg) {
  if (modulus.is_zero()) fail(Errc::Precondition, "hasse_search with zero modulus");
  if (!coprime(base, modulus))
    fail(Errc::NotPrimitive, "progression " + to_string(base) + " mod " + to_string(modulus));
  CanonicalEnumerator en(R.d);
  std::vector<HasseResult> found;
  std::uint64_t trials = 0;
  while (trials < cfg.search_budget && found.size() < count) {
    RingElem n = en.next();
    ++trials;
    RingElem q = base + modulus * n;
    q.d = R.d;
    if (q.is_zero() || is_unit(q)) continue;
    if (std::find(constraints.exclude.begin(), constraints.exclude.end(), q) != constraints.exclude.end()) continue;
    const PrimeKind kind = is_prime_elem(q, cfg.pseudoprime_rounds);
    if (!kind.prime() || !satisfies(q, kind, constraints)) continue;
    found.push_back({std::move(n), std::move(q), kind, trials});
  }
  if (found.empty())
    fail(Errc::SearchExhausted, "no prime in " + to_string(base) + " + " + to_string(modulus) + "*n after " +
                                    std::to_string(trials) + " trials");
  return found;
}

HasseResult hasse_search(const RingDesc& R, const RingElem& base, const RingElem& modulus,
                         const PrimeConstraints& constraints, const PrimeConfig& cfg) {
  return hasse_search_many(R, base, modulus, constraints, 1, cfg).front();
}

namespace {

PrimeKind require_prime(const RingElem& q, int rounds) {
  PrimeKind kind = is_prime_elem(q, rounds);
  if (!kind.prime()) fail(Errc::BadModulus, to_string(q) + " is not a prime element");
  return kind;
}

// r-th root (r prime) of an r-th power residue s in the residue field rr of
// size F, via the Adleman-Manders-Miller reduction to a discrete log in the
// r-Sylow subgroup.
RingElem prime_root(const ResidueRing& rr, const RingElem& s, long r, const Int& F) {
  const Int n = F - 1;
  const RingElem one = rr.reduce(RingElem(1, 0, rr.d()));
  Int t = n;
  unsigned long e = 0;
  while (t % r == 0) {
    t /= r;
    ++e;
  }
  Int alpha = 0;
  if (t > 1) {
    mpz_invert(alpha.get_mpz_t(), Int(r).get_mpz_t(), t.get_mpz_t());
  }
  RingElem x = rr.pow(s, alpha);
  if (e == 0) return x;
  // error term s^(1 - r*alpha) lies in the r-Sylow subgroup
  const Int err_exp = r * alpha - 1;
  RingElem h = err_exp >= 0 ? rr.pow(rr.invert(s), err_exp) : rr.pow(s, -err_exp);
  // non-residue search over 1, w, 2, 1 + w, ...: for inert primes every
  // rational integer is an r-th power, so omega must take part early
  RingElem z;
  const Int cofactor = n / r;
  bool have_z = false;
  for (Int j = 0; !have_z; ++j)
    for (int y = 0; y <= 1 && !have_z; ++y) {
      z = rr.reduce(RingElem(j + (y == 0 ? 1 : 0), y, rr.d()));
      have_z = !z.is_zero() && rr.pow(z, cofactor) != one;
    }
  const RingElem c = rr.pow(z, t);
  const RingElem c_inv = rr.invert(c);
  Int r_pow_top = 1;
  for (unsigned long i = 0; i + 1 < e; ++i) r_pow_top *= r;
  const RingElem gamma = rr.pow(c, r_pow_top);
  Int L = 0;
  Int r_i = 1;
  Int r_rest = r_pow_top;
  for (unsigned long i = 0; i < e; ++i) {
    const RingElem delta = rr.pow(rr.mul(h, rr.pow(c_inv, L)), r_rest);
    long digit = -1;
    RingElem g = one;
    for (long k = 0; k < r; ++k) {
      if (g == delta) {
        digit = k;
        break;
      }
      g = rr.mul(g, gamma);
    }
    if (digit < 0) fail(Errc::NotResidue, "discrete log failed in root extraction");
    L += digit * r_i;
    r_i *= r;
    if (i + 1 < e) r_rest /= r;
  }
  if (L % r != 0) fail(Errc::NotResidue, "error term is not an r-th power");
  return rr.mul(x, rr.pow(c, L / r));
}

}  // namespace

bool mth_power_residue(const RingElem& s, const RingElem& q, long m, int rounds) {
  const PrimeKind kind = require_prime(q, rounds);
  const Int F = kind.field_size;
  if (m <= 0 || (F - 1) % m != 0) fail(Errc::BadModulus, std::to_string(m) + " does not divide |F| - 1");
  const ResidueRing rr(q);
  const RingElem sr = rr.reduce(s);
  if (sr.is_zero()) fail(Errc::Precondition, "s is not invertible modulo q");
  return rr.pow(sr, (F - 1) / m) == rr.reduce(RingElem(1, 0, q.d));
}

RingElem mth_root_mod(const RingElem& s, const RingElem& q, long m, int rounds) {
  if (!mth_power_residue(s, q, m, rounds)) fail(Errc::NotResidue, to_string(s) + " mod " + to_string(q));
  const PrimeKind kind = is_prime_elem(q, rounds);
  const ResidueRing rr(q);
  const RingElem target = rr.reduce(s);
  RingElem cur = target;
  long rest = m;
  for (long r = 2; rest > 1; ++r) {
    while (rest % r == 0) {
      cur = prime_root(rr, cur, r, kind.field_size);
      rest /= r;
    }
  }
  if (rr.pow(cur, m) != target) {
    cur = RingElem();
    bool found = false;
    if (kind.field_size <= 10000) {
      for (Int i = 0; i < rr.size() && !found; ++i) {
        RingElem cand = rr.element(i);
        if (rr.pow(cand, m) == target) {
          cur = cand;
          found = true;
        }
      }
    }
    if (!found) fail(Errc::NotResidue, "root extraction failed verification");
  }
  return rr.reduce(cur);
}

int hilbert_odd(const RingElem& alpha, const RingElem& beta, const RingElem& q, int rounds) {
  if (alpha.is_zero() || beta.is_zero()) fail(Errc::Precondition, "hilbert symbol of zero");
  const PrimeKind kind = require_prime(q, rounds);
  if (kind.residue_char == 2) fail(Errc::EvenPlace, "residue characteristic 2");
  auto strip = [&](RingElem v) {
    unsigned long val = 0;
    while (auto quotient = try_div(v, q)) {
      v = *quotient;
      ++val;
    }
    return std::pair{v, val};
  };
  const auto [a0, va] = strip(alpha);
  const auto [b0, vb] = strip(beta);
  const ResidueRing rr(q);
  RingElem u = rr.mul(rr.pow(a0, Int(vb)), rr.pow(rr.invert(b0), Int(va)));
  if ((va * vb) % 2 == 1) u = rr.reduce(-u);
  const RingElem ls = rr.pow(u, (kind.field_size - 1) / 2);
  if (ls == rr.reduce(RingElem(1, 0, q.d))) return 1;
  if (ls == rr.reduce(RingElem(-1, 0, q.d))) return -1;
  fail(Errc::Precondition, "Legendre symbol is neither 1 nor -1");
}

}  // namespace qsl2
