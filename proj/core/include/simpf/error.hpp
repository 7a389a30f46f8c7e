#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simpf {

enum class ErrorKind {
  kFormat,            // malformed container or header
  kUnsupportedCodec,  // well-formed WAV with an encoding we do not decode
  kPrecondition,      // caller violated a documented precondition
  kConfig,            // invalid configuration (spectrogram, compression, arch)
  kInputTooShort,     // not enough frames for the requested operator
  kShape,             // incompatible geometry between layers / tensors
  kIo,                // filesystem failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace simpf
