#pragma once

#include <stdexcept>
#include <string>

namespace htax {

enum class Errc {
  // grid / time
  TimeBeforeMarketDebut,
  NegativeRate,
  // money
  Overflow,
  Underflow,
  // trading
  InvalidFrame,
  InsufficientBalance,
  PurchaseAfterClose,
  FrameStillOpen,
  AlreadyFinalized,
  // oracle
  NonMonotonicTime,
  TimeBeforePath,
  ZeroInterval,
  NonMonotonicCumulative,
  MissingSnapshot,
  // resolution / settlement
  NotMatured,
  AlreadyResolved,
  NotResolved,
  NothingToClaim,
  // scenario
  ParseError,
  ValidationError,
};

const char* errc_name(Errc code) noexcept;

/// Library-wide exception; `code()` identifies the failed contract.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace htax
