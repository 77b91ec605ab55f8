#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsl2 {

enum class Errc {
  NotDivisible,
  NotCoprime,
  NotInvertible,
  NonPrincipal,
  TooLarge,
  SearchExhausted,
  NotPrimitive,
  BadModulus,
  NotResidue,
  EvenPlace,
  DegenerateTrace,
  RowMismatch,
  MagicNotIntegral,
  VerificationFailed,
  InvalidInput,
  Precondition,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qsl2
