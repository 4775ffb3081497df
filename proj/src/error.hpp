#pragma once

#include <stdexcept>
#include <string>

namespace mamimo {

enum class ErrorCode {
  kInvalidArgument,
  kConfigInvalid,
  kNotPositiveDefinite,
  kRegionTooSmall,
  kGridTooLarge,
  kNoEpisodes,
  kArchitectureMismatch,
  kRankDeficient,
  kCheckpointInvalid,
  kIo,
};

const char* error_code_name(ErrorCode code);

// All recoverable failures in the library surface as this exception.
// The C API maps `code` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mamimo
