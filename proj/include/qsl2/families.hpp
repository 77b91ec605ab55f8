#pragma once

// Registry of bounded matrix families and the certificate data model.
//
//   E12(r), E21(r)   elementary matrices
//   ZWORD            an explicit matrix in SL2(Z)
//   MAGIC(z1..z5)    D W(1+z5 z1, z5 z2, z5 z3, 1+z5 z4) D^-1, D = diag(z5, 1)
//
// with W(x) = N M N J, M = I + [[-x1x3, x1^2], [-x3^2, x1x3]],
// N = I + [[-x2x4, x2^2], [-x4^2, x2x4]], J = [[0,-1],[1,0]].

#include <array>
#include <string>
#include <vector>

#include "qsl2/sl2.hpp"

namespace qsl2 {

enum class Family { E12, E21, ZWORD, MAGIC };

const char* family_name(Family f);

struct Factor {
  Family family = Family::E12;
  std::vector<RingElem> params;  // E12/E21: 1, MAGIC: 5, ZWORD: none
  Matrix2 zmatrix;               // ZWORD only
  bool inverse = false;
  std::string origin;            // free-form tag, ignored by verification

  static Factor e12(const RingElem& r, std::string origin = {});
  static Factor e21(const RingElem& r, std::string origin = {});
  static Factor zword(const Matrix2& m, std::string origin = {});
  static Factor magic(const std::array<RingElem, 5>& z, bool inverse, std::string origin = {});
};

struct Certificate {
  long d = -1;
  Matrix2 target;
  std::vector<Factor> factors;
};

Matrix2 wfam(const RingElem& x1, const RingElem& x2, const RingElem& x3, const RingElem& x4);
/// W at the entries of a; asserts W = a a^T when det(a) = 1.
Matrix2 wfam_check(const RingElem& x1, const RingElem& x2, const RingElem& x3, const RingElem& x4);
Matrix2 magic(const std::array<RingElem, 5>& z);

/// Throws InvalidInput for malformed factors, MagicNotIntegral on a broken identity.
Matrix2 eval_factor(const Factor& f);
Matrix2 eval_certificate(const Certificate& c);

/// Factor with the inverse value (flag toggled; identities elided by callers).
Factor inverse_of(Factor f);

struct VerifyReport {
  bool ok = true;
  std::string message;
};

VerifyReport verify_certificate(const Certificate& c);

std::string certificate_to_json(const Certificate& c);
/// Throws InvalidInput on malformed JSON or schema violations.
Certificate certificate_from_json(const std::string& text);

/// Matrix in the target-coordinate layout [[[x,y],[x,y]],[[x,y],[x,y]]].
std::string matrix_to_json(const Matrix2& m);
Matrix2 matrix_from_json(const std::string& text, long d);

}  // namespace qsl2
