#pragma once

#include <string>
#include <string_view>

namespace qpgm::io {

inline constexpr std::string_view kFingerprintAlgorithm = "sha256-lf";

/// Line endings normalised to LF and trailing blank lines dropped, so a CRLF
/// copy of a file fingerprints the same as the original.
std::string canonicalize(std::string_view bytes);

/// Lower-case hex SHA-256 of canonicalize(bytes).
std::string fingerprint(std::string_view bytes);

}  // namespace qpgm::io
