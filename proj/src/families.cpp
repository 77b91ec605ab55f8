#include "qsl2/families.hpp"

#include <json.hpp>

#include "qsl2/error.hpp"

namespace qsl2 {

using json = nlohmann::ordered_json;

const char* family_name(Family f) {
  switch (f) {
    case Family::E12: return "E12";
    case Family::E21: return "E21";
    case Family::ZWORD: return "ZWORD";
    case Family::MAGIC: return "MAGIC";
  }
  return "?";
}

Factor Factor::e12(const RingElem& r, std::string origin) { return {Family::E12, {r}, {}, false, std::move(origin)}; }
Factor Factor::e21(const RingElem& r, std::string origin) { return {Family::E21, {r}, {}, false, std::move(origin)}; }
Factor Factor::zword(const Matrix2& m, std::string origin) { return {Family::ZWORD, {}, m, false, std::move(origin)}; }
Factor Factor::magic(const std::array<RingElem, 5>& z, bool inverse, std::string origin) {
  return {Family::MAGIC, {z.begin(), z.end()}, {}, inverse, std::move(origin)};
}

namespace {

// Truncated polynomial a + b*eps, eps^2 = 0: evaluates MAGIC's (2,1) entry
// divided by z5 in the limit z5 -> 0.
struct Dual {
  RingElem a, b;
};
Dual operator+(const Dual& x, const Dual& y) { return {x.a + y.a, x.b + y.b}; }
Dual operator-(const Dual& x, const Dual& y) { return {x.a - y.a, x.b - y.b}; }
Dual operator-(const Dual& x) { return {-x.a, -x.b}; }
Dual operator*(const Dual& x, const Dual& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }

template <class T>
struct Mat {
  T a, b, c, d;
};

template <class T>
Mat<T> mul(const Mat<T>& x, const Mat<T>& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// W(x) = N M N J
template <class T>
Mat<T> w_generic(const T& x1, const T& x2, const T& x3, const T& x4, const T& one, const T& zero) {
  const Mat<T> m{one - x1 * x3, x1 * x1, -(x3 * x3), one + x1 * x3};
  const Mat<T> n{one - x2 * x4, x2 * x2, -(x4 * x4), one + x2 * x4};
  const Mat<T> j{zero, -one, one, zero};
  return mul(mul(mul(n, m), n), j);
}

long ring_of(const std::vector<RingElem>& xs) {
  for (const auto& x : xs)
    if (x.d != 0) return x.d;
  return 0;
}

}  // namespace

Matrix2 wfam(const RingElem& x1, const RingElem& x2, const RingElem& x3, const RingElem& x4) {
  const long d = ring_of({x1, x2, x3, x4});
  const RingElem one(1, 0, d), zero(0, 0, d);
  auto w = w_generic(x1, x2, x3, x4, one, zero);
  return {w.a, w.b, w.c, w.d};
}

Matrix2 wfam_check(const RingElem& x1, const RingElem& x2, const RingElem& x3, const RingElem& x4) {
  const Matrix2 w = wfam(x1, x2, x3, x4);
  const Matrix2 a{x1, x2, x3, x4};
  const long d = ring_of({x1, x2, x3, x4});
  if (a.det() == RingElem(1, 0, d) && w != a * a.transpose())
    fail(Errc::VerificationFailed, "W(A) != A A^T for " + to_string(a));
  return w;
}

Matrix2 magic(const std::array<RingElem, 5>& z) {
  const long d = ring_of({z.begin(), z.end()});
  const RingElem one(1, 0, d), zero(0, 0, d);
  const RingElem& z5 = z[4];
  if (z5.is_zero()) {
    // polynomial limit: only the (2,1) entry W21 / z5 needs care
    const Dual e1{one, z[0]}, e2{zero, z[1]}, e3{zero, z[2]}, e4{one, z[3]};
    auto w = w_generic(e1, e2, e3, e4, Dual{one, zero}, Dual{zero, zero});
    if (!w.c.a.is_zero()) fail(Errc::MagicNotIntegral, "W21 does not vanish at z5 = 0");
    return {w.a.a, zero, w.c.b, w.d.a};
  }
  auto w = w_generic(one + z5 * z[0], z5 * z[1], z5 * z[2], one + z5 * z[3], one, zero);
  auto c = try_div(w.c, z5);
  if (!c) fail(Errc::MagicNotIntegral, "W21 not divisible by z5");
  return {w.a, z5 * w.b, *c, w.d};
}

Matrix2 eval_factor(const Factor& f) {
  Matrix2 m;
  switch (f.family) {
    case Family::E12:
    case Family::E21:
      if (f.params.size() != 1) fail(Errc::InvalidInput, std::string(family_name(f.family)) + " takes one parameter");
      m = f.family == Family::E12 ? e12(f.params[0]) : e21(f.params[0]);
      break;
    case Family::ZWORD: {
      const Matrix2& z = f.zmatrix;
      if (!f.params.empty()) fail(Errc::InvalidInput, "ZWORD takes no parameters");
      if (!z.a.is_rational() || !z.b.is_rational() || !z.c.is_rational() || !z.d.is_rational())
        fail(Errc::InvalidInput, "ZWORD entries must be rational integers");
      if (z.a.x * z.d.x - z.b.x * z.c.x != 1) fail(Errc::InvalidInput, "ZWORD determinant is not 1");
      m = z;
      break;
    }
    case Family::MAGIC:
      if (f.params.size() != 5) fail(Errc::InvalidInput, "MAGIC takes five parameters");
      m = magic({f.params[0], f.params[1], f.params[2], f.params[3], f.params[4]});
      break;
  }
  return f.inverse ? inv(m) : m;
}

Matrix2 eval_certificate(const Certificate& c) {
  Matrix2 acc = Matrix2::identity(c.d);
  for (const auto& f : c.factors) acc = acc * eval_factor(f);
  return acc;
}

Factor inverse_of(Factor f) {
  switch (f.family) {
    case Family::E12:
    case Family::E21:
      f.params[0] = -f.params[0];
      break;
    case Family::ZWORD:
      f.zmatrix = inv(f.zmatrix);
      break;
    case Family::MAGIC:
      f.inverse = !f.inverse;
      break;
  }
  return f;
}

VerifyReport verify_certificate(const Certificate& c) {
  Matrix2 got;
  try {
    for (std::size_t i = 0; i < c.factors.size(); ++i) {
      const Factor& f = c.factors[i];
      for (const auto& p : f.params)
        if (p.d != c.d) return {false, "factor " + std::to_string(i) + " is over a different ring"};
      const Matrix2 m = eval_factor(f);
      if (m.det() != RingElem(1, 0, c.d))
        return {false, "factor " + std::to_string(i) + " has determinant " + to_string(m.det())};
    }
    got = eval_certificate(c);
  } catch (const Error& e) {
    return {false, std::string("malformed factor: ") + e.what()};
  }
  const RingElem* want[] = {&c.target.a, &c.target.b, &c.target.c, &c.target.d};
  const RingElem* have[] = {&got.a, &got.b, &got.c, &got.d};
  std::string diff;
  for (int k = 0; k < 4; ++k) {
    if (*want[k] == *have[k]) continue;
    if (!diff.empty()) diff += "; ";
    diff += "entry (" + std::to_string(k / 2 + 1) + "," + std::to_string(k % 2 + 1) + "): target " +
            to_string(*want[k]) + ", product " + to_string(*have[k]);
  }
  if (!diff.empty()) return {false, "mismatch at " + diff};
  return {true, {}};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json elem_json(const RingElem& e) { return json::array({to_string(e.x), to_string(e.y)}); }

json matrix_json(const Matrix2& m) {
  return json::array({json::array({elem_json(m.a), elem_json(m.b)}), json::array({elem_json(m.c), elem_json(m.d)})});
}

Int int_from(const json& j) {
  if (!j.is_string()) fail(Errc::InvalidInput, "integers must be decimal strings");
  return parse_int(j.get<std::string>());
}

RingElem elem_from(const json& j, long d) {
  if (!j.is_array() || j.size() != 2) fail(Errc::InvalidInput, "ring element must be a pair [x, y]");
  return RingElem(int_from(j[0]), int_from(j[1]), d);
}

Matrix2 matrix_from(const json& j, long d) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() || j[1].size() != 2)
    fail(Errc::InvalidInput, "matrix must be [[e, e], [e, e]]");
  return {elem_from(j[0][0], d), elem_from(j[0][1], d), elem_from(j[1][0], d), elem_from(j[1][1], d)};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string certificate_to_json(const Certificate& c) {
  json j;
  j["ring"] = {{"d", c.d}};
  j["target"] = matrix_json(c.target);
  json fs = json::array();
  for (const auto& f : c.factors) {
    json jf;
    jf["family"] = family_name(f.family);
    if (f.family == Family::ZWORD) {
      const Matrix2& z = f.zmatrix;
      jf["matrix"] = json::array({json::array({to_string(z.a.x), to_string(z.b.x)}),
                                  json::array({to_string(z.c.x), to_string(z.d.x)})});
    } else {
      json ps = json::array();
      for (const auto& p : f.params) ps.push_back(elem_json(p));
      jf["params"] = ps;
    }
    if (f.inverse) jf["inverse"] = true;
    if (!f.origin.empty()) jf["origin"] = f.origin;
    fs.push_back(jf);
  }
  j["factors"] = fs;
  return j.dump() + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    if (!j.is_object()) fail(Errc::InvalidInput, "certificate must be a JSON object");
    Certificate c;
    const json& ring = j.at("ring");
    if (!ring.at("d").is_number_integer()) fail(Errc::InvalidInput, "ring.d must be an integer");
    c.d = ring.at("d").get<long>();
    RingDesc::make(c.d);  // validates d
    c.target = matrix_from(j.at("target"), c.d);
    const json& fs = j.at("factors");
    if (!fs.is_array()) fail(Errc::InvalidInput, "factors must be an array");
    for (const auto& jf : fs) {
      Factor f;
      const std::string fam = jf.at("family").get<std::string>();
      if (fam == "E12") f.family = Family::E12;
      else if (fam == "E21") f.family = Family::E21;
      else if (fam == "ZWORD") f.family = Family::ZWORD;
      else if (fam == "MAGIC") f.family = Family::MAGIC;
      else fail(Errc::InvalidInput, "unknown family " + fam);
      if (f.family == Family::ZWORD) {
        const json& m = jf.at("matrix");
        if (!m.is_array() || m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
          fail(Errc::InvalidInput, "ZWORD matrix must be 2x2");
        f.zmatrix = Matrix2::from_ints(c.d, int_from(m[0][0]), int_from(m[0][1]), int_from(m[1][0]), int_from(m[1][1]));
        if (jf.contains("params")) fail(Errc::InvalidInput, "ZWORD takes no parameters");
      } else {
        const json& ps = jf.at("params");
        if (!ps.is_array()) fail(Errc::InvalidInput, "params must be an array");
        for (const auto& p : ps) f.params.push_back(elem_from(p, c.d));
      }
      if (jf.contains("inverse")) {
        if (!jf["inverse"].is_boolean()) fail(Errc::InvalidInput, "inverse must be a boolean");
        f.inverse = jf["inverse"].get<bool>();
      }
      if (jf.contains("origin")) f.origin = jf["origin"].get<std::string>();
      c.factors.push_back(std::move(f));
    }
    return c;
  } catch (const json::exception& e) {
    fail(Errc::InvalidInput, std::string("certificate schema: ") + e.what());
  }
}

std::string matrix_to_json(const Matrix2& m) { return matrix_json(m).dump(); }

Matrix2 matrix_from_json(const std::string& text, long d) {
  const json j = parse(text);
  try {
    return matrix_from(j, d);
  } catch (const json::exception& e) {
    fail(Errc::InvalidInput, std::string("matrix schema: ") + e.what());
  }
}

}  // namespace qsl2
