#pragma once

// Twig pattern queries: the query tree itself plus the text grammar.
//
//   query := axis node step*
//   step  := axis node
//   axis  := '//' | '/'
//   node  := '$'? tag pred?
//   tag   := '@'? [A-Za-z_][A-Za-z0-9_.-]*
//   pred  := '[' path (' and ' path)* ']'
//   path  := '.'? axis node step*
//
// '$' marks an output query node. The leading axis is the edge from a
// virtual document root, which makes '/r' and '//r' distinguishable.

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpq/labels.hpp"

namespace tpq {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)),
        pos_(pos) {}
  std::size_t pos() const { return pos_; }

 private:
  std::size_t pos_;
};

struct QueryNode {
  std::string tag;
  bool is_output = false;
  Axis edge_to_parent = Axis::AD;  // meaningless on the root
  std::vector<std::unique_ptr<QueryNode>> children;

  // Derived, filled by TwigQuery::refresh().
  QueryNode* parent = nullptr;
  int id = 0;  // pre-order position, 0-based
};

struct TwigQuery {
  std::unique_ptr<QueryNode> root;
  Axis root_axis = Axis::AD;  // edge from the virtual document root

  // Derived views.
  std::vector<QueryNode*> nodes;  // pre-order
  int n = 0;
  int n_o = 0;

  void refresh() {
    nodes.clear();
    n_o = 0;
    if (root) collect(root.get(), nullptr);
    n = static_cast<int>(nodes.size());
  }

 private:
  void collect(QueryNode* q, QueryNode* parent) {
    q->parent = parent;
    q->id = static_cast<int>(nodes.size());
    nodes.push_back(q);
    if (q->is_output) ++n_o;
    for (auto& c : q->children) collect(c.get(), q);
  }
};

inline bool query_equal(const QueryNode& a, const QueryNode& b) {
  if (a.tag != b.tag || a.is_output != b.is_output ||
      a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (a.children[i]->edge_to_parent != b.children[i]->edge_to_parent)
      return false;
    if (!query_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

inline bool query_equal(const TwigQuery& a, const TwigQuery& b) {
  return a.root_axis == b.root_axis && a.root && b.root &&
         query_equal(*a.root, *b.root);
}

namespace detail {

class TpqParser {
 public:
  explicit TpqParser(std::string_view text) : text_(text) {}

  TwigQuery parse(bool require_output) {
    TwigQuery q;
    skip_ws();
    q.root_axis = parse_axis();
    q.root = parse_node();
    parse_steps(q.root.get());
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input after query");
    q.refresh();
    if (require_output && q.n_o == 0)
      fail("no output node marked with '$'", 0);
    return q;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(msg, at);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!eof() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  Axis parse_axis() {
    if (peek() != '/') fail("expected '/' or '//'");
    ++pos_;
    if (peek() == '/') {
      ++pos_;
      return Axis::AD;
    }
    return Axis::PC;
  }

  static bool tag_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  }
  static bool tag_char(char c) {
    return tag_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
  }

  std::string parse_tag() {
    std::string tag;
    if (peek() == '@') {
      tag += '@';
      ++pos_;
    }
    if (!tag_start(peek())) fail("expected tag name");
    while (!eof() && tag_char(text_[pos_])) tag += text_[pos_++];
    return tag;
  }

  std::unique_ptr<QueryNode> parse_node() {
    auto node = std::make_unique<QueryNode>();
    if (peek() == '$') {
      node->is_output = true;
      ++pos_;
    }
    node->tag = parse_tag();
    skip_ws();
    if (peek() == '[') parse_pred(node.get());
    return node;
  }

  void parse_pred(QueryNode* owner) {
    ++pos_;  // '['
    while (true) {
      skip_ws();
      parse_path(owner);
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return;
      }
      if (!match_keyword("and")) fail("expected 'and' or ']' in predicate");
    }
  }

  bool match_keyword(std::string_view kw) {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t after = pos_ + kw.size();
    if (after < text_.size() && tag_char(text_[after])) return false;
    pos_ = after;
    return true;
  }

  void parse_path(QueryNode* owner) {
    if (peek() == '.') ++pos_;  // '[/e]' is equivalent to '[./e]'
    Axis ax = parse_axis();
    auto child = parse_node();
    child->edge_to_parent = ax;
    QueryNode* tail = child.get();
    owner->children.push_back(std::move(child));
    parse_steps(tail);
  }

  // Chain of '/x' or '//x' steps; each step hangs off the previous node.
  void parse_steps(QueryNode* from) {
    QueryNode* cur = from;
    while (true) {
      skip_ws();
      if (peek() != '/') return;
      Axis ax = parse_axis();
      auto child = parse_node();
      child->edge_to_parent = ax;
      QueryNode* next = child.get();
      cur->children.push_back(std::move(child));
      cur = next;
    }
  }
};

inline void render_node(const QueryNode& q, std::string& out) {
  if (q.is_output) out += '$';
  out += q.tag;
  std::size_t k = q.children.size();
  if (k == 0) return;
  if (k > 1) {
    out += '[';
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (i) out += " and ";
      out += '.';
      out += q.children[i]->edge_to_parent == Axis::AD ? "//" : "/";
      render_node(*q.children[i], out);
    }
    out += ']';
  }
  const QueryNode& last = *q.children[k - 1];
  out += last.edge_to_parent == Axis::AD ? "//" : "/";
  render_node(last, out);
}

}  // namespace detail

inline TwigQuery parse_tpq(std::string_view text) {
  return detail::TpqParser(text).parse(/*require_output=*/true);
}

// A bare twig pattern: output markers optional. Used where the output
// marking is assigned afterwards, e.g. randomized benchmark variants.
inline TwigQuery parse_twig_pattern(std::string_view text) {
  return detail::TpqParser(text).parse(/*require_output=*/false);
}

// Textual form that parses back to an equal query.
inline std::string render_tpq(const TwigQuery& q) {
  std::string out = q.root_axis == Axis::AD ? "//" : "/";
  detail::render_node(*q.root, out);
  return out;
}

inline std::unique_ptr<QueryNode> clone_node(const QueryNode& q) {
  auto copy = std::make_unique<QueryNode>();
  copy->tag = q.tag;
  copy->is_output = q.is_output;
  copy->edge_to_parent = q.edge_to_parent;
  for (auto& c : q.children) copy->children.push_back(clone_node(*c));
  return copy;
}

inline TwigQuery clone_query(const TwigQuery& q) {
  TwigQuery copy;
  copy.root_axis = q.root_axis;
  copy.root = clone_node(*q.root);
  copy.refresh();
  return copy;
}

// True iff x is q or an ancestor of q in the query tree.
inline bool is_query_ancestor_or_self(const QueryNode* x, const QueryNode* q) {
  for (const QueryNode* cur = q; cur; cur = cur->parent)
    if (cur == x) return true;
  return false;
}

}  // namespace tpq
