#pragma once

// Synthetic document generators used by the benchmarks and the
// pathological-space tests.

#include <stdexcept>
#include <string>

namespace tpq {

enum class DocShape { Demo, Suboptimal };

// Demo: root r with children a_1..a_n, each a_i holding b_i(c_i); the last
// b_n additionally holds a d after c_n. Node count is 3n + 2.
//
// Suboptimal: a_1 containing a_2 containing b_1..b_n, plus b_x as a_1's
// second child. The nested a pair makes the a stream recursive.
inline std::string gen_doc(DocShape shape, int n) {
  if (n < 1) throw std::invalid_argument("gen_doc: n must be >= 1");
  std::string out;
  switch (shape) {
    case DocShape::Demo:
      out.reserve(static_cast<std::size_t>(n) * 24 + 16);
      out += "<r>";
      for (int i = 1; i <= n; ++i) {
        out += i == n ? "<a><b><c/><d/></b></a>" : "<a><b><c/></b></a>";
      }
      out += "</r>";
      break;
    case DocShape::Suboptimal:
      out.reserve(static_cast<std::size_t>(n) * 4 + 24);
      out += "<a><a>";
      for (int i = 0; i < n; ++i) out += "<b/>";
      out += "</a><b/></a>";
      break;
  }
  return out;
}

inline DocShape doc_shape_from_name(const std::string& name) {
  if (name == "demo") return DocShape::Demo;
  if (name == "suboptimal") return DocShape::Suboptimal;
  throw std::invalid_argument("unknown document shape: " + name);
}

}  // namespace tpq
