#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace paratrap::detail {

// Number of code points; good enough for the arrows and names we print.
inline std::size_t display_width(const std::string &s) {
  std::size_t n = 0;
  for (unsigned char ch : s)
    n += (ch & 0xC0) != 0x80;
  return n;
}

// Left-aligned columns separated by two spaces, trailing blanks trimmed.
inline std::string format_table(const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> widths;
  for (const auto &r : rows)
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (widths.size() <= k)
        widths.push_back(0);
      widths[k] = std::max(widths[k], display_width(r[k]));
    }
  std::string out;
  for (const auto &r : rows) {
    std::string line;
    for (std::size_t k = 0; k < r.size(); ++k) {
      line += r[k];
      if (k + 1 < r.size())
        line += std::string(widths[k] - display_width(r[k]) + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ')
      line.pop_back();
    out += line + "\n";
  }
  return out;
}

} // namespace paratrap::detail
