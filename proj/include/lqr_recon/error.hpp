#pragma once

#include <stdexcept>
#include <string>

namespace lqr_recon {

/// Failure categories shared by every module. The numeric values are the
/// status codes returned through the C API.
enum class ErrorCode : int {
  kStructural = 2,       // dimension mismatch, malformed input
  kPrecondition = 3,     // operation called outside its contract
  kNumerical = 4,        // factorization failed, non-PD matrix
  kDegenerateGeometry = 5,
  kRankDeficient = 6,
  kNotConverged = 7,
  kDomain = 8,           // argument outside the admissible set (e.g. R not PD)
  kAmbiguous = 9,        // solution family not one-dimensional
  kIndefinite = 10,      // recovered weights not PD after sign fix
  kSearchFailed = 11,
  kIo = 12,
  kParse = 13,
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

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace lqr_recon
