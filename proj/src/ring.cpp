#include "qsl2/ring.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <utility>

namespace qsl2 {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::NotCoprime: return "NotCoprime";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::NonPrincipal: return "NonPrincipal";
    case Errc::TooLarge: return "TooLarge";
    case Errc::SearchExhausted: return "SearchExhausted";
    case Errc::NotPrimitive: return "NotPrimitive";
    case Errc::BadModulus: return "BadModulus";
    case Errc::NotResidue: return "NotResidue";
    case Errc::EvenPlace: return "EvenPlace";
    case Errc::DegenerateTrace: return "DegenerateTrace";
    case Errc::RowMismatch: return "RowMismatch";
    case Errc::MagicNotIntegral: return "MagicNotIntegral";
    case Errc::VerificationFailed: return "VerificationFailed";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::Precondition: return "Precondition";
  }
  return "Unknown";
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int floor_mod(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  if (r < 0) r += abs(b);
  return r;
}

Int round_div(const Int& a, const Int& b) {
  if (b < 0) return round_div(-a, -b);
  return floor_div(2 * a + b, 2 * b);
}

std::string to_string(const Int& v) { return v.get_str(); }

Int parse_int(const std::string& s) {
  Int v;
  if (s.empty() || v.set_str(s, 10) != 0) fail(Errc::InvalidInput, "not a decimal integer: '" + s + "'");
  return v;
}

namespace {

bool squarefree(long n) {
  n = std::labs(n);
  for (long p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
  }
  return true;
}

// Number of reduced primitive forms (a, b, c) of discriminant disc < 0.
int count_reduced_forms(long disc) {
  int h = 0;
  const long D = -disc;
  for (long a = 1; 3 * a * a <= D; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      const long num = b * b + D;
      if (num % (4 * a) != 0) continue;
      const long c = num / (4 * a);
      if (c < a) continue;
      if (c == a && b < 0) continue;
      long g = std::gcd(std::gcd(a, std::labs(b)), c);
      if (g != 1) continue;
      ++h;
    }
  }
  return h;
}

long desc_d(const RingElem& a, const RingElem& b) { return a.d != 0 ? a.d : b.d; }

bool half_basis_of(long d) { return ((d % 4) + 4) % 4 == 1; }

}  // namespace

RingDesc RingDesc::make(long d) {
  if (d >= 0) fail(Errc::InvalidInput, "d must be negative, got " + std::to_string(d));
  if (!squarefree(d)) fail(Errc::InvalidInput, "d must be squarefree, got " + std::to_string(d));
  RingDesc r;
  r.d = d;
  r.half_basis = half_basis_of(d);
  r.disc = r.half_basis ? d : 4 * d;
  r.m = d == -1 ? 4 : (d == -3 ? 6 : 2);
  r.class_number = count_reduced_forms(r.disc);
  return r;
}

RingElem elem(const RingDesc& R, const Int& x, const Int& y) { return RingElem(x, y, R.d); }
RingElem omega(const RingDesc& R) { return RingElem(0, 1, R.d); }

RingElem operator+(const RingElem& a, const RingElem& b) { return RingElem(a.x + b.x, a.y + b.y, desc_d(a, b)); }
RingElem operator-(const RingElem& a, const RingElem& b) { return RingElem(a.x - b.x, a.y - b.y, desc_d(a, b)); }
RingElem operator-(const RingElem& a) { return RingElem(-a.x, -a.y, a.d); }

RingElem operator*(const RingElem& a, const RingElem& b) {
  const long d = desc_d(a, b);
  Int yy = a.y * b.y;
  if (yy == 0) return RingElem(a.x * b.x, a.x * b.y + a.y * b.x, d);
  if (d == 0) fail(Errc::Precondition, "ring element without ring tag");
  if (half_basis_of(d)) {
    const long k = (d - 1) / 4;
    return RingElem(a.x * b.x + k * yy, a.x * b.y + a.y * b.x + yy, d);
  }
  return RingElem(a.x * b.x + d * yy, a.x * b.y + a.y * b.x, d);
}

RingElem operator*(const RingElem& a, const Int& k) { return RingElem(a.x * k, a.y * k, a.d); }
RingElem operator*(const Int& k, const RingElem& a) { return a * k; }

RingElem conj(const RingElem& e) {
  if (e.y == 0) return e;
  if (half_basis_of(e.d)) return RingElem(e.x + e.y, -e.y, e.d);
  return RingElem(e.x, -e.y, e.d);
}

RingElem pow(const RingElem& e, unsigned long n) {
  RingElem result(1, 0, e.d);
  RingElem base = e;
  while (n != 0) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n != 0) base = base * base;
  }
  return result;
}

Int norm(const RingElem& e) {
  if (e.y == 0) return e.x * e.x;
  if (half_basis_of(e.d)) return e.x * e.x + e.x * e.y + ((1 - e.d) / 4) * e.y * e.y;
  return e.x * e.x - e.d * e.y * e.y;
}

Int trace(const RingElem& e) {
  if (half_basis_of(e.d) && e.y != 0) return 2 * e.x + e.y;
  return 2 * e.x;
}

bool is_unit(const RingElem& e) { return norm(e) == 1; }

bool canonical_less(const RingElem& a, const RingElem& b) {
  const Int na = norm(a), nb = norm(b);
  if (na != nb) return na < nb;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

std::optional<RingElem> try_div(const RingElem& a, const RingElem& b) {
  if (b.is_zero()) fail(Errc::Precondition, "division by zero");
  const Int n = norm(b);
  RingElem p = a * conj(b);
  if (!mpz_divisible_p(p.x.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(p.y.get_mpz_t(), n.get_mpz_t()))
    return std::nullopt;
  Int qx, qy;
  mpz_divexact(qx.get_mpz_t(), p.x.get_mpz_t(), n.get_mpz_t());
  mpz_divexact(qy.get_mpz_t(), p.y.get_mpz_t(), n.get_mpz_t());
  return RingElem(std::move(qx), std::move(qy), desc_d(a, b));
}

RingElem div_exact(const RingElem& a, const RingElem& b) {
  auto q = try_div(a, b);
  if (!q) fail(Errc::NotDivisible, to_string(a) + " / " + to_string(b));
  return *q;
}

namespace {

std::vector<RingElem> units_of(long d) {
  std::vector<RingElem> out{RingElem(1, 0, d), RingElem(-1, 0, d)};
  for (int y = -2; y <= 2; ++y) {
    if (y == 0) continue;
    for (int x = -2; x <= 2; ++x) {
      RingElem e(x, y, d);
      if (norm(e) == 1) out.push_back(e);
    }
  }
  return out;
}

}  // namespace

std::vector<RingElem> units(const RingDesc& R) { return units_of(R.d); }

RingElem unit_inverse(const RingElem& u) {
  if (!is_unit(u)) fail(Errc::NotInvertible, to_string(u) + " is not a unit");
  return conj(u);
}

HnfWithTransform hnf_transform(const std::vector<std::array<Int, 2>>& cols_in) {
  const std::size_t k = cols_in.size();
  std::vector<std::array<Int, 2>> cols = cols_in;
  std::vector<std::vector<Int>> coef(k, std::vector<Int>(k, 0));
  for (std::size_t i = 0; i < k; ++i) coef[i][i] = 1;

  auto axpy = [&](std::size_t dst, std::size_t src, const Int& q) {
    if (q == 0) return;
    cols[dst][0] -= q * cols[src][0];
    cols[dst][1] -= q * cols[src][1];
    for (std::size_t j = 0; j < k; ++j) coef[dst][j] -= q * coef[src][j];
  };
  auto negate = [&](std::size_t i) {
    cols[i][0] = -cols[i][0];
    cols[i][1] = -cols[i][1];
    for (auto& c : coef[i]) c = -c;
  };
  // gcd-eliminate coordinate `row` over the columns in `active`; returns the
  // surviving pivot index or k if every entry is zero.
  auto eliminate = [&](const std::vector<std::size_t>& active, int row) {
    for (;;) {
      std::size_t pivot = k;
      std::size_t nonzero = 0;
      for (auto i : active) {
        if (cols[i][row] == 0) continue;
        ++nonzero;
        if (pivot == k || abs(cols[i][row]) < abs(cols[pivot][row])) pivot = i;
      }
      if (nonzero <= 1) return pivot;
      for (auto i : active) {
        if (i == pivot || cols[i][row] == 0) continue;
        axpy(i, pivot, floor_div(cols[i][row], cols[pivot][row]));
      }
    }
  };

  std::vector<std::size_t> all(k);
  for (std::size_t i = 0; i < k; ++i) all[i] = i;
  const std::size_t p2 = eliminate(all, 1);
  if (p2 == k) fail(Errc::Precondition, "lattice is not of full rank");
  if (cols[p2][1] < 0) negate(p2);
  std::vector<std::size_t> rest;
  for (auto i : all)
    if (i != p2) rest.push_back(i);
  const std::size_t p1 = eliminate(rest, 0);
  if (p1 == k) fail(Errc::Precondition, "lattice is not of full rank");
  if (cols[p1][0] < 0) negate(p1);
  axpy(p2, p1, floor_div(cols[p2][0], cols[p1][0]));

  HnfWithTransform out;
  out.hnf = LatticeHnf{cols[p1][0], cols[p2][0], cols[p2][1]};
  out.first = coef[p1];
  out.second = coef[p2];
  return out;
}

namespace {

std::array<Int, 2> coords(const RingElem& e) { return {e.x, e.y}; }

std::vector<std::array<Int, 2>> ideal_columns(const RingElem& g1, const RingElem& g2) {
  const long d = desc_d(g1, g2);
  const RingElem w(0, 1, d);
  return {coords(g1), coords(g1 * w), coords(g2), coords(g2 * w)};
}

}  // namespace

LatticeHnf ideal_lattice(const RingElem& g1, const RingElem& g2) {
  if (g1.is_zero() && g2.is_zero()) fail(Errc::Precondition, "zero ideal");
  return hnf_transform(ideal_columns(g1, g2)).hnf;
}

Bezout bezout(const RingElem& a, const RingElem& b) {
  if (a.is_zero() && b.is_zero()) fail(Errc::Precondition, "bezout of (0, 0)");
  const long d = desc_d(a, b);
  const auto h = hnf_transform(ideal_columns(a, b));
  if (h.hnf.det() != 1) fail(Errc::NotCoprime, "(" + to_string(a) + ", " + to_string(b) + ") is not the unit ideal");
  const auto& z = h.first;
  RingElem u(z[0], z[1], d), v(z[2], z[3], d);
  if (!b.is_zero()) {
    RingElem u2 = small_rep(u, b);
    RingElem k = div_exact(u - u2, b);
    v = v + a * k;
    u = u2;
  }
  if (a * u + b * v != RingElem(1, 0, d)) fail(Errc::Precondition, "bezout self-check failed");
  return {u, v};
}

bool coprime(const RingElem& a, const RingElem& b) {
  if (a.is_zero() && b.is_zero()) return false;
  return ideal_lattice(a, b).det() == 1;
}

RingElem small_rep(const RingElem& e, const RingElem& m) {
  if (m.is_zero()) return e;
  const long d = desc_d(e, m);
  const Int n = norm(m);
  const RingElem p = e * conj(m);
  const Int kx = round_div(p.x, n), ky = round_div(p.y, n);
  RingElem best;
  bool have = false;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      RingElem k(kx + dx, ky + dy, d);
      RingElem cand = e - m * k;
      if (!have || canonical_less(cand, best)) {
        best = cand;
        have = true;
      }
    }
  }
  best.d = d;
  return best;
}

ResidueRing::ResidueRing(const RingElem& q) : q_(q) {
  if (q.is_zero()) fail(Errc::Precondition, "residue ring modulo zero");
  hnf_ = ideal_lattice(q, RingElem(0, 0, q.d));
}

RingElem ResidueRing::reduce(const RingElem& e) const {
  Int y = floor_mod(e.y, hnf_.n2);
  Int k = (e.y - y) / hnf_.n2;
  Int x = floor_mod(e.x - k * hnf_.s, hnf_.n1);
  return RingElem(std::move(x), std::move(y), q_.d);
}

RingElem ResidueRing::pow(const RingElem& e, Int n) const {
  if (n < 0) fail(Errc::Precondition, "negative exponent");
  RingElem result = reduce(RingElem(1, 0, q_.d));
  RingElem base = reduce(e);
  while (n != 0) {
    if (mpz_odd_p(n.get_mpz_t())) result = mul(result, base);
    n >>= 1;
    if (n != 0) base = mul(base, base);
  }
  return result;
}

RingElem ResidueRing::invert(const RingElem& e) const {
  try {
    return reduce(bezout(e, q_).u);
  } catch (const Error& err) {
    if (err.code() == Errc::NotCoprime || err.code() == Errc::Precondition)
      fail(Errc::NotInvertible, to_string(e) + " mod " + to_string(q_));
    throw;
  }
}

RingElem ResidueRing::element(const Int& index) const {
  Int y = floor_div(index, hnf_.n1);
  Int x = index - y * hnf_.n1;
  return RingElem(std::move(x), std::move(y), q_.d);
}

RingElem residue_reduce(const ResidueRing& rr, const RingElem& e) { return rr.reduce(e); }
RingElem residue_invert(const ResidueRing& rr, const RingElem& e) { return rr.invert(e); }

RingElem crt_pair(const RingElem& m1, const RingElem& r1, const RingElem& m2, const RingElem& r2) {
  const Bezout bz = bezout(m1, m2);
  RingElem x = r1 * m2 * bz.v + r2 * m1 * bz.u;
  const RingElem prod = m1 * m2;
  if (!prod.is_zero()) x = ResidueRing(prod).reduce(x);
  return x;
}

RingElem ideal_generator(const RingElem& g1, const RingElem& g2) {
  const long d = desc_d(g1, g2);
  const LatticeHnf h = ideal_lattice(g1, g2);
  RingElem b1(h.n1, 0, d), b2(h.s, h.n2, d);
  if (norm(b1) > norm(b2)) std::swap(b1, b2);
  for (;;) {
    const Int mu = round_div(trace(b2 * conj(b1)), 2 * norm(b1));
    b2 = b2 - b1 * mu;
    if (norm(b2) >= norm(b1)) break;
    std::swap(b1, b2);
  }
  if (norm(b1) != h.det()) fail(Errc::NonPrincipal, "ideal (" + to_string(g1) + ", " + to_string(g2) + ")");
  RingElem best = b1;
  for (const auto& u : units_of(d)) {
    RingElem c = b1 * u;
    if (canonical_less(c, best)) best = c;
  }
  return best;
}

std::string to_string(const RingElem& e) { return "[" + e.x.get_str() + "," + e.y.get_str() + "]"; }

}  // namespace qsl2
