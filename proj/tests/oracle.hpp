#pragma once

// Brute-force residue-ring oracles on machine integers.  Deliberately shares
// no code with the library: its own lattice reduction, multiplication and
// exhaustive searches.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using i64 = std::int64_t;

struct SmallRing {
  i64 d;
  bool half;

  explicit SmallRing(i64 d_) : d(d_), half(((d_ % 4) + 4) % 4 == 1) {}

  std::pair<i64, i64> mul(i64 x1, i64 y1, i64 x2, i64 y2) const {
    if (half) {
      const i64 k = (d - 1) / 4;
      return {x1 * x2 + k * y1 * y2, x1 * y2 + x2 * y1 + y1 * y2};
    }
    return {x1 * x2 + d * y1 * y2, x1 * y2 + x2 * y1};
  }
  i64 norm(i64 x, i64 y) const {
    if (half) return x * x + x * y + ((1 - d) / 4) * y * y;
    return x * x - d * y * y;
  }
};

inline i64 fmod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

/// O/(q) with elements indexed 0..size-1.
struct SmallResidue {
  SmallRing R;
  i64 n1 = 0, s = 0, n2 = 0;

  SmallResidue(i64 d, i64 qx, i64 qy) : R(d) {
    // lattice spanned by q and q*w; Euclid on the second coordinate
    auto [wx, wy] = R.mul(qx, qy, 0, 1);
    i64 ax = qx, ay = qy, bx = wx, by = wy;
    while (by != 0) {
      i64 t = ay / by;
      ax -= t * bx;
      ay -= t * by;
      std::swap(ax, bx);
      std::swap(ay, by);
    }
    // (ax, ay) has ay = gcd, (bx, 0) spans the x-axis part
    if (ay < 0) {
      ax = -ax;
      ay = -ay;
    }
    n2 = ay;
    n1 = std::llabs(bx);
    s = fmod(ax, n1);
  }

  i64 size() const { return n1 * n2; }

  i64 reduce(i64 x, i64 y) const {
    i64 yr = fmod(y, n2);
    i64 k = (y - yr) / n2;
    i64 xr = fmod(x - k * s, n1);
    return xr + n1 * yr;
  }
  std::pair<i64, i64> coords(i64 idx) const { return {idx % n1, idx / n1}; }
  i64 mul(i64 a, i64 b) const {
    auto [ax, ay] = coords(a);
    auto [bx, by] = coords(b);
    auto [px, py] = R.mul(ax, ay, bx, by);
    return reduce(px, py);
  }
  i64 one() const { return reduce(1, 0); }

  /// Inverse by exhaustive search, -1 if none.
  i64 inverse(i64 a) const {
    const i64 o = one();
    for (i64 b = 0; b < size(); ++b)
      if (mul(a, b) == o) return b;
    return -1;
  }

  std::vector<i64> units() const {
    std::vector<i64> out;
    for (i64 a = 0; a < size(); ++a)
      if (inverse(a) >= 0) out.push_back(a);
    return out;
  }

  i64 order(i64 a) const {
    const i64 o = one();
    i64 k = 1, cur = a;
    while (cur != o) {
      cur = mul(cur, a);
      ++k;
    }
    return k;
  }

  i64 exponent() const {
    i64 e = 1;
    for (i64 u : units()) e = std::lcm(e, order(u));
    return e;
  }

  i64 power(i64 a, i64 n) const {
    i64 r = one();
    for (i64 i = 0; i < n; ++i) r = mul(r, a);
    return r;
  }

  /// Add two reduced indices.
  i64 add(i64 a, i64 b) const {
    auto [ax, ay] = coords(a);
    auto [bx, by] = coords(b);
    return reduce(ax + bx, ay + by);
  }

  /// Inverse index of every element, -1 for non-units.  Walks b over the
  /// whole ring updating a*b additively and records where it hits one.
  std::vector<i64> inverse_table() const {
    const i64 n = size(), o = one();
    std::vector<i64> inv(static_cast<std::size_t>(n), -1);
    const i64 w = reduce(0, 1);
    for (i64 a = 0; a < n; ++a) {
      const i64 aw = mul(a, w);
      i64 row = 0;  // a * (y w)
      for (i64 y = 0; y < n2 && inv[a] < 0; ++y) {
        i64 cur = row;  // a * (x + y w)
        for (i64 x = 0; x < n1; ++x) {
          if (cur == o) {
            inv[a] = reduce(x, y);
            break;
          }
          cur = add(cur, a);
        }
        row = add(row, aw);
      }
    }
    return inv;
  }

  i64 power_fast(i64 a, i64 k) const {
    i64 r = one(), b = a;
    while (k > 0) {
      if (k & 1) r = mul(r, b);
      b = mul(b, b);
      k >>= 1;
    }
    return r;
  }

  /// Unit-group exponent: least divisor k of |U| with u^k = 1 for every unit u.
  i64 exponent_fast(const std::vector<i64>& inv) const {
    std::vector<i64> us;
    for (i64 a = 0; a < size(); ++a)
      if (inv[a] >= 0) us.push_back(a);
    const i64 order = static_cast<i64>(us.size()), o = one();
    for (i64 k = 1; k <= order; ++k) {
      if (order % k != 0) continue;
      bool all = true;
      for (i64 u : us)
        if (power_fast(u, k) != o) {
          all = false;
          break;
        }
      if (all) return k;
    }
    return order;
  }

  std::set<i64> mth_powers(i64 m) const {
    std::set<i64> out;
    for (i64 a = 0; a < size(); ++a) out.insert(power(a, m));
    return out;
  }
};

/// One representative per principal ideal (canonically smallest associate)
/// of norm in [2, max_norm].
inline std::vector<std::pair<i64, i64>> moduli_up_to(i64 d, i64 max_norm) {
  SmallRing R(d);
  std::vector<std::pair<i64, i64>> units;
  for (i64 y = -2; y <= 2; ++y)
    for (i64 x = -2; x <= 2; ++x)
      if (R.norm(x, y) == 1) units.emplace_back(x, y);
  auto key = [&](i64 x, i64 y) { return std::tuple(R.norm(x, y), x, y); };
  std::vector<std::pair<i64, i64>> out;
  const i64 bound = 2 * static_cast<i64>(std::sqrt(static_cast<double>(max_norm))) + 4;
  for (i64 y = -bound; y <= bound; ++y) {
    for (i64 x = -bound; x <= bound; ++x) {
      const i64 n = R.norm(x, y);
      if (n < 2 || n > max_norm) continue;
      bool smallest = true;
      for (auto [ux, uy] : units) {
        auto [ax, ay] = R.mul(x, y, ux, uy);
        if (key(ax, ay) < key(x, y)) smallest = false;
      }
      if (smallest) out.emplace_back(x, y);
    }
  }
  return out;
}

inline bool is_small_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

/// Prime elements: O/(q) is a field, i.e. every non-zero element invertible.
inline bool residue_is_field(const SmallResidue& rr) {
  const i64 n = rr.size();
  if (!is_small_prime(n)) {
    i64 p = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(n))));
    if (p * p != n || !is_small_prime(p)) return false;
  }
  for (i64 a = 1; a < n; ++a)
    if (rr.inverse(a) < 0) return false;
  return true;
}

}  // namespace oracle
