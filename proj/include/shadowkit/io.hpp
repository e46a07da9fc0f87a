#pragma once

#include <iosfwd>
#include <string>

namespace shadowkit::io {

/// Shortest round-trip-safe text for a double ("%.17g"); non-finite values become "nan"/"inf"/"-inf".
std::string fmt(double x);

/// Writes every line of `header` prefixed with "# ".
void write_comment_block(std::ostream& os, const std::string& header);

}  // namespace shadowkit::io
