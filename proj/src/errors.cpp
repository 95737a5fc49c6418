#include "probebench/errors.hpp"

#include <fmt/format.h>

namespace probebench {

const char* to_string(FormatErrorKind kind) noexcept {
  switch (kind) {
    case FormatErrorKind::kBadMagic: return "bad magic";
    case FormatErrorKind::kUnsupportedVersion: return "unsupported version";
    case FormatErrorKind::kTruncated: return "truncated";
    case FormatErrorKind::kOutOfRange: return "out of range";
    case FormatErrorKind::kNonFinite: return "non-finite value";
    case FormatErrorKind::kBadHeader: return "bad header";
    case FormatErrorKind::kIo: return "i/o error";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& what)
    : Error(fmt::format("{} at byte offset {}: {}", to_string(kind), offset, what)),
      kind_(kind),
      offset_(offset) {}

}  // namespace probebench
