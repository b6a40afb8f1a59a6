#pragma once

#include <stdexcept>
#include <string>

namespace hetlab {

enum class ErrorCode {
  Domain,                // non-finite input
  Parse,                 // malformed JSON / schema violation
  Config,                // invalid integrator or experiment configuration
  NoRealEquilibria,      // b11^2 - 4 c1 <= 0
  SignPatternViolation,  // roots on L1 do not straddle the origin
  DegenerateCoefficient, // a divisor coefficient vanishes
  NotASaddleInS134,      // an expanding eigenvalue at xi_b is not positive
  NoUnstableDirection,   // shooting source has no expanding direction
  PreconditionViolated,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hetlab
