#include "qsl2/sl2.hpp"

#include <algorithm>

#include "qsl2/error.hpp"

namespace qsl2 {

Matrix2 Matrix2::identity(long ring) { return from_ints(ring, 1, 0, 0, 1); }

Matrix2 Matrix2::from_ints(long ring, const Int& a, const Int& b, const Int& c, const Int& d) {
  return {RingElem(a, 0, ring), RingElem(b, 0, ring), RingElem(c, 0, ring), RingElem(d, 0, ring)};
}

bool Matrix2::is_identity() const {
  return a.x == 1 && a.y == 0 && b.is_zero() && c.is_zero() && d.x == 1 && d.y == 0;
}

Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Matrix2 inv(const Matrix2& m) { return {m.d, -m.b, -m.c, m.a}; }

Matrix2 pow(const Matrix2& m, unsigned long n) {
  Matrix2 result = Matrix2::identity(m.ring()), base = m;
  while (n > 0) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

Matrix2 e12(const RingElem& r) {
  Matrix2 m = Matrix2::identity(r.d);
  m.b = r;
  return m;
}

Matrix2 e21(const RingElem& r) {
  Matrix2 m = Matrix2::identity(r.d);
  m.c = r;
  return m;
}

std::string to_string(const Matrix2& m) {
  return "[[" + to_string(m.a) + "," + to_string(m.b) + "],[" + to_string(m.c) + "," + to_string(m.d) + "]]";
}

void IntPoly::normalize() {
  while (!coef.empty() && coef.back() == 0) coef.pop_back();
}

Int IntPoly::eval(const Int& t) const {
  Int acc = 0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * t + *it;
  return acc;
}

IntPoly operator*(const IntPoly& p, const IntPoly& q) {
  if (p.coef.empty() || q.coef.empty()) return {};
  IntPoly r;
  r.coef.assign(p.coef.size() + q.coef.size() - 1, Int(0));
  for (std::size_t i = 0; i < p.coef.size(); ++i)
    for (std::size_t j = 0; j < q.coef.size(); ++j) r.coef[i + j] += p.coef[i] * q.coef[j];
  r.normalize();
  return r;
}

IntPoly operator-(const IntPoly& p, const IntPoly& q) {
  IntPoly r;
  r.coef.assign(std::max(p.coef.size(), q.coef.size()), Int(0));
  for (std::size_t i = 0; i < p.coef.size(); ++i) r.coef[i] += p.coef[i];
  for (std::size_t i = 0; i < q.coef.size(); ++i) r.coef[i] -= q.coef[i];
  r.normalize();
  return r;
}

IntPoly q_poly(long n) {
  if (n < -1 || n > kQPolyCap) fail(Errc::Precondition, "q_poly index out of range");
  IntPoly prev{{Int(-1)}}, cur{};
  if (n == -1) return prev;
  const IntPoly t{{Int(0), Int(1)}};
  for (long i = 0; i < n; ++i) {
    IntPoly next = t * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace {

// (u_n, u_{n+1})
std::pair<RingElem, RingElem> u_pair(const RingElem& tau, unsigned long n) {
  RingElem uk(0, 0, tau.d), uk1(1, 0, tau.d);
  int top = 63;
  while (top >= 0 && ((n >> top) & 1UL) == 0) --top;
  for (int bit = top; bit >= 0; --bit) {
    RingElem u2k = uk * (uk1 * Int(2) - tau * uk);
    RingElem u2k1 = uk1 * uk1 - uk * uk;
    if ((n >> bit) & 1UL) {
      uk = u2k1;
      uk1 = tau * u2k1 - u2k;
    } else {
      uk = std::move(u2k);
      uk1 = std::move(u2k1);
    }
  }
  return {uk, uk1};
}

}  // namespace

USeq u_seq(const RingElem& tau, unsigned long n) {
  auto [un, un1] = u_pair(tau, n);
  return {tau * un - un1, un};
}

VWSplit vw_split(const RingElem& tau, unsigned long n) {
  if (n < 2) fail(Errc::Precondition, "vw_split needs n >= 2");
  const unsigned long k = n / 2;
  VWSplit out;
  if (n % 2 == 0) {
    auto [uk, uk1] = u_pair(tau, k);
    RingElem ukm1 = tau * uk - uk1;
    out = {uk1 - ukm1, uk};
  } else {
    auto [uk, uk1] = u_pair(tau, k);
    out = {uk1 - uk, uk1 + uk};
  }
  const USeq u = u_seq(tau, n);
  const RingElem one(1, 0, tau.d);
  if (u.cur.is_zero() || out.v.is_zero() || out.w.is_zero())
    fail(Errc::DegenerateTrace, "u_n vanishes at trace " + to_string(tau));
  if (out.v * out.w != u.cur || !try_div(u.prev - one, out.v) || !try_div(u.prev + one, out.w))
    fail(Errc::DegenerateTrace, "vw split check failed at trace " + to_string(tau));
  return out;
}

PowerRow power_first_row(const Matrix2& alpha, unsigned long n) {
  const RingElem tau = alpha.a + alpha.d;
  const USeq u = u_seq(tau, n);
  PowerRow row{alpha.a * u.cur - u.prev, alpha.b * u.cur, u.cur, u.prev};
  if (n <= 64) {
    const Matrix2 p = pow(alpha, n);
    if (p.a != row.a_n || p.b != row.b_n) fail(Errc::VerificationFailed, "power_first_row disagrees with pow");
  }
  return row;
}

Matrix2 complete_row(const RingElem& a, const RingElem& b) {
  Bezout bz;
  try {
    bz = bezout(a, b);
  } catch (const Error& e) {
    if (e.code() == Errc::NotCoprime) fail(Errc::NotPrimitive, "row (" + to_string(a) + ", " + to_string(b) + ") is not primitive");
    throw;
  }
  return {a, b, -bz.v, bz.u};
}

RingElem row_fixup(const Matrix2& m, const Matrix2& m2) {
  const Matrix2 x = m2 * inv(m);
  if (!(x.a.x == 1 && x.a.y == 0 && x.b.is_zero() && x.d.x == 1 && x.d.y == 0))
    fail(Errc::RowMismatch, "first rows differ: " + to_string(m) + " vs " + to_string(m2));
  return x.c;
}

}  // namespace qsl2
