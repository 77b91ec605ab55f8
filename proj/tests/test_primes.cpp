#include <algorithm>

#include "doctest.h"
#include "oracle.hpp"
#include "qsl2/primes.hpp"

using namespace qsl2;

namespace {

RingElem to_elem(long d, std::pair<oracle::i64, oracle::i64> c) { return RingElem(c.first, c.second, d); }

}  // namespace

TEST_CASE("prime classification") {
  const auto G = RingDesc::make(-1);
  auto k = is_prime_elem(elem(G, 1, 1));
  CHECK(k.tag == PrimeTag::Ramified);
  CHECK(k.residue_char == 2);
  k = is_prime_elem(elem(G, 3));
  CHECK(k.tag == PrimeTag::InertDeg2);
  CHECK(k.field_size == 9);
  CHECK(is_prime_elem(elem(G, 5)).tag == PrimeTag::NotPrime);
  CHECK(is_prime_elem(elem(G, 2, 1)).tag == PrimeTag::SplitDeg1);
  const auto E = RingDesc::make(-19);
  CHECK(is_prime_elem(elem(E, 2)).tag == PrimeTag::InertDeg2);  // -19 = 5 mod 8
  CHECK(is_prime_elem(elem(E, 3)).tag == PrimeTag::InertDeg2);
  CHECK(is_prime_elem(omega(E)).tag == PrimeTag::SplitDeg1);  // norm 5

  // agreement with the field criterion of the oracle
  for (long d : {-1L, -3L, -7L, -19L}) {
    for (auto q : oracle::moduli_up_to(d, 300)) {
      oracle::SmallResidue rr(d, q.first, q.second);
      CHECK(is_prime_elem(to_elem(d, q)).prime() == oracle::residue_is_field(rr));
    }
  }
}

TEST_CASE("element factorization") {
  const auto G = RingDesc::make(-1);
  auto f = factor_elem(G, elem(G, 2));
  REQUIRE(f.factors.size() == 1);
  CHECK(f.factors[0].second == 2);
  CHECK(norm(f.factors[0].first) == 2);
  CHECK(f.unit * pow(f.factors[0].first, 2) == elem(G, 2));

  RingElem p = elem(G, 2, 1);
  auto fp = factor_elem(G, p);
  REQUIRE(fp.factors.size() == 1);
  CHECK(fp.factors[0].second == 1);
  CHECK(fp.unit * fp.factors[0].first == p);

  const auto E = RingDesc::make(-7);
  auto f7 = factor_elem(E, elem(E, 2));
  REQUIRE(f7.factors.size() == 2);
  CHECK(norm(f7.factors[0].first) == 2);
  CHECK(norm(f7.factors[1].first) == 2);

  for (long d : {-1L, -2L, -3L, -7L, -11L, -19L, -43L, -67L, -163L}) {
    const auto R = RingDesc::make(d);
    for (long x = -30; x <= 30; x += 7) {
      for (long y = -30; y <= 30; y += 5) {
        RingElem e = elem(R, x, y);
        if (e.is_zero()) continue;
        auto fac = factor_elem(R, e);
        RingElem back = fac.unit;
        CHECK(is_unit(fac.unit));
        for (auto& [pi, mult] : fac.factors) {
          CHECK(is_prime_elem(pi).prime());
          back = back * pow(pi, static_cast<unsigned long>(mult));
        }
        CHECK(back == e);
      }
    }
  }
  CHECK(factor_int(Int("1000000016000000063")).size() == 2);  // 1000000007 * 1000000009
}

TEST_CASE("unit group exponents") {
  const auto G = RingDesc::make(-1);
  CHECK(epsilon(G, elem(G, 1, 2)) == 4);
  CHECK(epsilon(G, elem(G, 3)) == 8);
  CHECK(epsilon(G, elem(G, 2)) == 2);
  CHECK_THROWS_AS(epsilon(G, elem(G, 1)), Error);
  for (long d : {-1L, -3L, -7L, -19L}) {
    const auto R = RingDesc::make(d);
    for (auto q : oracle::moduli_up_to(d, 150)) {
      oracle::SmallResidue rr(d, q.first, q.second);
      CHECK(epsilon(R, to_elem(d, q)) == rr.exponent());
    }
  }
}

TEST_CASE("canonical enumeration") {
  CanonicalEnumerator en(-1);
  std::vector<RingElem> seen;
  for (int i = 0; i < 200; ++i) seen.push_back(en.next());
  CHECK(seen[0].is_zero());
  CHECK(seen[1] == RingElem(-1, 0, -1));
  CHECK(seen[2] == RingElem(0, -1, -1));
  CHECK(std::is_sorted(seen.begin(), seen.end(), canonical_less));
  // every element of norm <= 40 appears exactly once before anything larger
  int count = 0;
  for (int x = -7; x <= 7; ++x)
    for (int y = -7; y <= 7; ++y)
      if (x * x + y * y <= 40) ++count;
  CHECK(norm(seen[count - 1]) <= 40);
  CHECK(norm(seen[count]) > 40);
}

TEST_CASE("hasse search") {
  const auto G = RingDesc::make(-1);
  auto res = hasse_search(G, elem(G, 1), elem(G, 2), {});
  CHECK(res.n == elem(G, 0, -1));
  CHECK(res.q == elem(G, 1, -2));
  auto same = hasse_search(G, elem(G, 2, 1), elem(G, 7), {});
  CHECK(same.n.is_zero());
  CHECK(same.q == elem(G, 2, 1));
  CHECK_THROWS_AS(hasse_search(G, elem(G, 1, 1), elem(G, 2), {}), Error);

  PrimeConfig tiny;
  tiny.search_budget = 3;
  PrimeConstraints impossible;
  impossible.extra = [](const RingElem&, const PrimeKind&) { return false; };
  try {
    hasse_search(G, elem(G, 1), elem(G, 2), impossible, tiny);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SearchExhausted);
  }

  // minimality against exhaustive enumeration with constraints
  for (long d : {-1L, -7L, -19L}) {
    const auto R = RingDesc::make(d);
    RingElem base = elem(R, 3, 1), mod = elem(R, 9);
    REQUIRE(coprime(base, mod));
    PrimeConstraints c;
    c.field_size_one_mod = Int(4);
    c.avoid_divisors_of = {elem(R, 6)};
    auto got = hasse_search(R, base, mod, c);
    CHECK(is_prime_elem(got.q).prime());
    CHECK(got.q == base + mod * got.n);
    CHECK(floor_mod(got.kind.field_size, Int(4)) == 1);
    std::vector<RingElem> all;
    for (long x = -40; x <= 40; ++x)
      for (long y = -40; y <= 40; ++y) all.push_back(elem(R, x, y));
    std::sort(all.begin(), all.end(), canonical_less);
    for (const auto& n : all) {
      if (!canonical_less(n, got.n)) break;
      RingElem q = base + mod * n;
      auto kind = is_prime_elem(q);
      bool ok = kind.prime() && floor_mod(kind.field_size, Int(4)) == 1 && !try_div(elem(R, 6), q);
      CHECK_FALSE(ok);
    }
  }
}

TEST_CASE("power residues and roots") {
  const auto G = RingDesc::make(-1);
  RingElem q = elem(G, 1, -2);
  CHECK(mth_power_residue(elem(G, 1), q, 2));
  CHECK(mth_power_residue(elem(G, 4), q, 2));
  CHECK_FALSE(mth_power_residue(elem(G, 2), q, 2));
  const RingElem r4 = mth_root_mod(elem(G, 4), q, 2);
  CHECK((r4 == elem(G, 2) || r4 == elem(G, 3)));
  CHECK(mth_root_mod(elem(G, 1), q, 2) == elem(G, 1));
  CHECK_THROWS_AS(mth_root_mod(elem(G, 2), q, 2), Error);
  CHECK_THROWS_AS(mth_power_residue(elem(G, 2), q, 3), Error);

  for (long d : {-1L, -3L, -7L, -19L}) {
    for (auto qc : oracle::moduli_up_to(d, 200)) {
      oracle::SmallResidue rr(d, qc.first, qc.second);
      if (!oracle::residue_is_field(rr)) continue;
      const RingElem qe = to_elem(d, qc);
      const oracle::i64 F = rr.size();
      for (long m : {2L, 3L, 4L, 6L}) {
        if ((F - 1) % m != 0) continue;
        auto powers = rr.mth_powers(m);
        for (oracle::i64 s = 1; s < F; ++s) {
          auto [sx, sy] = rr.coords(s);
          RingElem se(sx, sy, d);
          const bool expect = powers.count(s) > 0;
          CHECK(mth_power_residue(se, qe, m) == expect);
          if (expect) {
            RingElem r = mth_root_mod(se, qe, m);
            CHECK(rr.power(rr.reduce(r.x.get_si(), r.y.get_si()), m) == s);
          }
        }
      }
    }
  }
}

TEST_CASE("odd hilbert symbols") {
  const auto G = RingDesc::make(-1);
  RingElem p = elem(G, 2, 1);
  CHECK(hilbert_odd(elem(G, 3), elem(G, 7), p) == 1);
  CHECK(hilbert_odd(p, p, p) == 1);
  CHECK_THROWS_AS(hilbert_odd(elem(G, 3), elem(G, 5), elem(G, 1, 1)), Error);
  // [u, pi]_pi = Legendre(u) for a unit u at pi
  CHECK(hilbert_odd(elem(G, 2), p, p) == -1);

  // brute-force local solvability of a x^2 + b y^2 = 1 at F_p-level for units
  // and for (u, pi): solvable iff u is a square mod pi
  const auto E = RingDesc::make(-7);
  RingElem pi = elem(E, 1, 2);  // norm 1 + 2 + 8 = 11
  REQUIRE(is_prime_elem(pi).tag == PrimeTag::SplitDeg1);
  for (long u = 1; u < 11; ++u) {
    bool square = false;
    for (long x = 0; x < 11; ++x)
      if ((x * x - u) % 11 == 0) square = true;
    CHECK(hilbert_odd(elem(E, u), pi, pi) == (square ? 1 : -1));
  }
}
