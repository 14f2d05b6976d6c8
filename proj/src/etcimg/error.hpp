#pragma once

#include <stdexcept>
#include <string>

namespace etcimg {

// Failure classes map one-to-one onto the CLI exit codes and C API status codes.
enum class ErrorKind {
  InvalidArgument,  // caller passed an unusable value
  Data,             // input data is malformed or inconsistent
  Codec,            // JPEG codec failed or is unavailable
  Io,               // file could not be read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace etcimg
