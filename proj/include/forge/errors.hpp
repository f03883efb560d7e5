#pragma once
// Error taxonomy shared by all modules. Every failure mode gets its own type
// so callers can catch precisely; all derive from Error so the CLI boundary
// can map any domain failure to a single exit code.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

struct Error : std::runtime_error {
  explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// thrown when a base pair fails validation (k or ell < 2, or multiplicatively dependent)
struct InvalidBase : Error {
  using Error::Error;
};

// argument outside an operation's documented domain (e.g. lambda of 0)
struct DomainError : Error {
  using Error::Error;
};

// second_power of a pure power of k: no second digit exists
struct NoSecondDigit : Error {
  using Error::Error;
};

// malformed range arguments (lo > hi and similar)
struct RangeError : Error {
  using Error::Error;
};

// successor/count queries require the anchor to lie in S(K1) first
struct NotInS : Error {
  using Error::Error;
};

// sigma2 absent below the window bound where a count needs it
struct SuccessorUnbounded : Error {
  using Error::Error;
};

// a bounded search ran out of budget before finding what the theory promises
struct BudgetExhausted : Error {
  using Error::Error;
};

// witness vector length disagrees with the word it claims to witness
struct ShapeError : Error {
  using Error::Error;
};

// text input rejected; position is a byte offset (or a line number where the
// format is line-based, see the message)
struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what_arg, std::size_t pos)
      : Error(what_arg), position(pos) {}
};

// structurally parsed but semantically invalid input (machine tables etc.)
struct ValidationError : Error {
  using Error::Error;
};

// simulation did not reach the accepting state
struct NotHalted : Error {
  using Error::Error;
};

// internal cross-check failed; indicates a bug, never expected in normal runs
struct VerificationFailed : Error {
  using Error::Error;
};

// macro expansion would exceed the configured size limit
struct ExpansionTooLarge : Error {
  using Error::Error;
};

// a quantifier has no guard from which a finite enumeration can be derived
struct UnboundedQuantifier : Error {
  using Error::Error;
};

// a guard provably demands values beyond the evaluation caps
struct CapTooSmall : Error {
  using Error::Error;
};

}  // namespace forge
