#pragma once

// Exact arithmetic in the ring of integers O_d of an imaginary quadratic
// field Q(sqrt d).  Elements are stored in the integral basis (1, w) with
// w = (1 + sqrt d)/2 when d = 1 mod 4 and w = sqrt d otherwise.

#include <gmpxx.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qsl2/error.hpp"

namespace qsl2 {

using Int = mpz_class;

Int floor_div(const Int& a, const Int& b);
Int floor_mod(const Int& a, const Int& b);
/// Nearest integer to a/b, ties rounded towards +infinity.  b != 0.
Int round_div(const Int& a, const Int& b);
std::string to_string(const Int& v);
Int parse_int(const std::string& s);

struct RingDesc {
  long d = -1;
  bool half_basis = false;
  long disc = -4;
  int m = 4;             // number of units
  int class_number = 1;  // computed from reduced forms of discriminant disc

  /// Validates that d is a negative squarefree integer.
  static RingDesc make(long d);

  friend bool operator==(const RingDesc& a, const RingDesc& b) { return a.d == b.d; }
};

/// x + y*w.  `d` tags the ring; d == 0 is only used for default-constructed
/// rational integers and adopts the ring of the other operand.
struct RingElem {
  Int x = 0;
  Int y = 0;
  long d = 0;

  RingElem() = default;
  RingElem(Int x_, Int y_, long d_) : x(std::move(x_)), y(std::move(y_)), d(d_) {}

  bool is_zero() const { return x == 0 && y == 0; }
  bool is_rational() const { return y == 0; }

  friend bool operator==(const RingElem& a, const RingElem& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const RingElem& a, const RingElem& b) { return !(a == b); }
};

RingElem elem(const RingDesc& R, const Int& x, const Int& y = 0);
RingElem omega(const RingDesc& R);

RingElem operator+(const RingElem& a, const RingElem& b);
RingElem operator-(const RingElem& a, const RingElem& b);
RingElem operator-(const RingElem& a);
RingElem operator*(const RingElem& a, const RingElem& b);
RingElem operator*(const RingElem& a, const Int& k);
RingElem operator*(const Int& k, const RingElem& a);
RingElem conj(const RingElem& e);
RingElem pow(const RingElem& e, unsigned long n);

Int norm(const RingElem& e);
Int trace(const RingElem& e);
bool is_unit(const RingElem& e);

/// Canonical ordering used by every search: ascending norm, then (x, y).
bool canonical_less(const RingElem& a, const RingElem& b);

std::optional<RingElem> try_div(const RingElem& a, const RingElem& b);
/// Exact quotient a/b; throws NotDivisible.
RingElem div_exact(const RingElem& a, const RingElem& b);

std::vector<RingElem> units(const RingDesc& R);
/// Inverse of a unit; throws NotInvertible otherwise.
RingElem unit_inverse(const RingElem& u);

/// Column Hermite normal form of a full-rank sublattice of Z^2:
/// columns (n1, 0) and (s, n2), with n1, n2 > 0 and 0 <= s < n1.
struct LatticeHnf {
  Int n1, s, n2;
  Int det() const { return n1 * n2; }
};

/// HNF of the lattice spanned by `cols`, together with integer coefficient
/// vectors expressing each HNF column in terms of the inputs.
struct HnfWithTransform {
  LatticeHnf hnf;
  std::vector<Int> first;   // cols . first  == (n1, 0)
  std::vector<Int> second;  // cols . second == (s, n2)
};

HnfWithTransform hnf_transform(const std::vector<std::array<Int, 2>>& cols);

/// Integer lattice of the ideal (g1, g2) in coordinates (x, y).
LatticeHnf ideal_lattice(const RingElem& g1, const RingElem& g2);

struct Bezout {
  RingElem u, v;
};
/// u, v with a*u + b*v = 1; throws NotCoprime.
Bezout bezout(const RingElem& a, const RingElem& b);
bool coprime(const RingElem& a, const RingElem& b);

/// Representative of e modulo (m) of (near) minimal norm; deterministic.
RingElem small_rep(const RingElem& e, const RingElem& m);

/// O_d / (q) with canonical representatives 0 <= y < n2, 0 <= x < n1.
class ResidueRing {
 public:
  explicit ResidueRing(const RingElem& q);

  const RingElem& modulus() const { return q_; }
  const LatticeHnf& basis() const { return hnf_; }
  Int size() const { return hnf_.det(); }
  long d() const { return q_.d; }

  RingElem reduce(const RingElem& e) const;
  RingElem mul(const RingElem& a, const RingElem& b) const { return reduce(a * b); }
  RingElem pow(const RingElem& e, Int n) const;
  /// Throws NotInvertible when (e, q) != O.
  RingElem invert(const RingElem& e) const;
  bool equal(const RingElem& a, const RingElem& b) const { return reduce(a - b).is_zero(); }
  bool is_zero(const RingElem& e) const { return reduce(e).is_zero(); }

  /// Canonical enumeration index: x + n1*y for a reduced element.
  Int index(const RingElem& reduced) const { return reduced.x + hnf_.n1 * reduced.y; }
  RingElem element(const Int& index) const;

 private:
  RingElem q_;
  LatticeHnf hnf_;
};

RingElem residue_reduce(const ResidueRing& rr, const RingElem& e);
RingElem residue_invert(const ResidueRing& rr, const RingElem& e);

/// x with x = r1 mod (m1), x = r2 mod (m2), reduced modulo (m1*m2) when
/// that product is non-zero.  Throws NotCoprime.
RingElem crt_pair(const RingElem& m1, const RingElem& r1, const RingElem& m2, const RingElem& r2);

/// A generator of the ideal (g1, g2) via Lagrange-Gauss reduction; throws
/// NonPrincipal if the shortest lattice vector does not attain the ideal norm.
RingElem ideal_generator(const RingElem& g1, const RingElem& g2);

std::string to_string(const RingElem& e);

}  // namespace qsl2
