#pragma once

// 2x2 matrices over O_d and the Chebyshev-type recurrence
//   Q_{-1} = -1, Q_0 = 0, Q_{i+1} = t Q_i - Q_{i-1}
// that expresses powers of a det-1 matrix: alpha^n = u_n alpha - u_{n-1} I.

#include <string>
#include <vector>

#include "qsl2/ring.hpp"

namespace qsl2 {

struct Matrix2 {
  RingElem a, b, c, d;

  static Matrix2 identity(long ring);
  static Matrix2 from_ints(long ring, const Int& a, const Int& b, const Int& c, const Int& d);

  long ring() const { return a.d != 0 ? a.d : (b.d != 0 ? b.d : (c.d != 0 ? c.d : d.d)); }
  RingElem det() const { return a * d - b * c; }
  bool is_identity() const;
  Matrix2 transpose() const { return {a, c, b, d}; }

  friend bool operator==(const Matrix2& x, const Matrix2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const Matrix2& x, const Matrix2& y) { return !(x == y); }
};

Matrix2 operator*(const Matrix2& x, const Matrix2& y);
/// Adjugate; the inverse for det-1 matrices.
Matrix2 inv(const Matrix2& m);
Matrix2 pow(const Matrix2& m, unsigned long n);

Matrix2 e12(const RingElem& r);
Matrix2 e21(const RingElem& r);

std::string to_string(const Matrix2& m);

/// Dense integer polynomial, coefficient i of t^i, no zero leading term.
struct IntPoly {
  std::vector<Int> coef;

  int degree() const { return static_cast<int>(coef.size()) - 1; }
  void normalize();
  Int eval(const Int& t) const;
  friend bool operator==(const IntPoly& p, const IntPoly& q) { return p.coef == q.coef; }
};

IntPoly operator*(const IntPoly& p, const IntPoly& q);
IntPoly operator-(const IntPoly& p, const IntPoly& q);

inline constexpr long kQPolyCap = 200;

IntPoly q_poly(long n);

struct USeq {
  RingElem prev;  // u_{n-1}
  RingElem cur;   // u_n
};

/// (u_{n-1}, u_n) at t = tau by fast doubling.
USeq u_seq(const RingElem& tau, unsigned long n);

struct VWSplit {
  RingElem v, w;
};

/// u_n = v w with v | u_{n-1} - 1 and w | u_{n-1} + 1.  Throws DegenerateTrace.
VWSplit vw_split(const RingElem& tau, unsigned long n);

struct PowerRow {
  RingElem a_n, b_n, u_n, u_prev;
};

PowerRow power_first_row(const Matrix2& alpha, unsigned long n);

/// [[a, b], [-v, u]] from a u + b v = 1.  Throws NotPrimitive.
Matrix2 complete_row(const RingElem& a, const RingElem& b);

/// r with m2 = E21(r) m.  Throws RowMismatch.
RingElem row_fixup(const Matrix2& m, const Matrix2& m2);

}  // namespace qsl2
