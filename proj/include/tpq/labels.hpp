#pragma once

// Containment labels and the structural predicates resolved over them.
// A label [left:right, level] encodes one data node; interval nesting
// encodes ancestry, the level difference distinguishes parent from
// ancestor.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tpq {

enum class Axis : std::uint8_t { AD, PC };

inline const char* axis_name(Axis a) { return a == Axis::AD ? "AD" : "PC"; }

struct NodeLabel {
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t level = 0;

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

// True iff a's interval strictly contains d's.
inline bool rel_ad(const NodeLabel& a, const NodeLabel& d) {
  return a.left < d.left && d.right < a.right;
}

inline bool rel_pc(const NodeLabel& p, const NodeLabel& c) {
  return rel_ad(p, c) && p.level + 1 == c.level;
}

inline bool rel(Axis ax, const NodeLabel& a, const NodeLabel& b) {
  return ax == Axis::AD ? rel_ad(a, b) : rel_pc(a, b);
}

// Document order. Within one document all left values are unique, so
// comparing lefts is a total order.
inline bool doc_less(const NodeLabel& x, const NodeLabel& y) {
  return x.left < y.left;
}

using Tuple = std::vector<NodeLabel>;

// Lexicographic document order over equal-arity tuples, column by column.
inline int lex_compare(std::span<const NodeLabel> t1,
                       std::span<const NodeLabel> t2) {
  if (t1.size() != t2.size())
    throw std::invalid_argument("lex_compare: arity mismatch");
  for (std::size_t c = 0; c < t1.size(); ++c) {
    if (t1[c].left != t2[c].left) return t1[c].left < t2[c].left ? -1 : 1;
  }
  return 0;
}

inline bool lex_less(const Tuple& t1, const Tuple& t2) {
  return lex_compare(t1, t2) < 0;
}

inline std::string format_label(const NodeLabel& l) {
  return "[" + std::to_string(l.left) + ":" + std::to_string(l.right) + "," +
         std::to_string(l.level) + "]";
}

inline std::string format_tuple(std::span<const NodeLabel> t) {
  std::string out;
  for (std::size_t c = 0; c < t.size(); ++c) {
    if (c) out += '\t';
    out += format_label(t[c]);
  }
  return out;
}

}  // namespace tpq
