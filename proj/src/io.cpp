#include "shadowkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace shadowkit::io {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_comment_block(std::ostream& os, const std::string& header) {
  if (header.empty()) return;
  std::istringstream in(header);
  std::string line;
  while (std::getline(in, line)) os << "# " << line << '\n';
}

}  // namespace shadowkit::io
