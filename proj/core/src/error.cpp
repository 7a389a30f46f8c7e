#include "simpf/error.hpp"

namespace simpf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUnsupportedCodec: return "unsupported codec";
    case ErrorKind::kPrecondition: return "precondition violation";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kInputTooShort: return "input too short";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

}  // namespace simpf
