#pragma once

// XML ingestion and the inverted-list index.
//
// Labeling: one counter starting at 1 ticks at every element open,
// attribute, attribute end and element close. An element takes left at
// open and right at close; an attribute becomes a child node with a
// consecutive (left, left+1) interval, level = parent level + 1 and an
// '@'-prefixed tag. Text, comments and PIs produce no labels.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tpq/labels.hpp"

namespace tpq {

class XmlError : public std::runtime_error {
 public:
  XmlError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at offset " + std::to_string(pos)) {}
};

class IndexFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvertedIndex {
  std::map<std::string, std::vector<NodeLabel>> lists;
  std::uint32_t node_count = 0;
  std::uint32_t depth = 0;
  std::set<std::string> recursive_tags;

  std::span<const NodeLabel> list(std::string_view tag) const {
    auto it = lists.find(std::string(tag));
    if (it == lists.end()) return {};
    return it->second;
  }

  bool is_recursive(std::string_view tag) const {
    return recursive_tags.count(std::string(tag)) > 0;
  }

  // Virtual document root covering every label.
  NodeLabel virtual_root() const { return {0, 2 * node_count + 1, 0}; }

  void finalize() {
    recursive_tags.clear();
    for (auto& [tag, list] : lists) {
      // Lists are sorted by left; an earlier interval reaching past the
      // current left must contain it (intervals nest or are disjoint).
      std::uint32_t max_right = 0;
      for (const NodeLabel& l : list) {
        if (max_right > l.left) {
          recursive_tags.insert(tag);
          break;
        }
        if (l.right > max_right) max_right = l.right;
      }
    }
  }
};

inline std::span<const NodeLabel> index_scan(const InvertedIndex& idx,
                                             std::string_view tag) {
  return idx.list(tag);
}

namespace detail {

class XmlLabeler {
 public:
  explicit XmlLabeler(std::string_view xml) : xml_(xml) {}

  InvertedIndex run() {
    skip_misc();
    if (eof()) throw XmlError("empty document", 0);
    parse_element();
    skip_misc();
    if (!eof()) throw XmlError("content after document element", pos_);
    idx_.finalize();
    return std::move(idx_);
  }

 private:
  std::string_view xml_;
  std::size_t pos_ = 0;
  std::uint32_t counter_ = 0;
  std::uint32_t depth_ = 0;
  InvertedIndex idx_;

  bool eof() const { return pos_ >= xml_.size(); }
  char peek() const { return eof() ? '\0' : xml_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) {
    throw XmlError(msg, pos_);
  }

  static bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }
  static bool name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
           c == ':';
  }
  static bool name_char(char c) {
    return name_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
  }

  void skip_ws() {
    while (!eof() && is_ws(xml_[pos_])) ++pos_;
  }

  // Whitespace, comments and PIs outside the document element.
  void skip_misc() {
    while (true) {
      skip_ws();
      if (xml_.substr(pos_, 4) == "<!--") {
        skip_comment();
      } else if (xml_.substr(pos_, 2) == "<?") {
        skip_pi();
      } else {
        return;
      }
    }
  }

  void skip_comment() {
    std::size_t end = xml_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) fail("unterminated comment");
    pos_ = end + 3;
  }

  void skip_pi() {
    std::size_t end = xml_.find("?>", pos_ + 2);
    if (end == std::string_view::npos)
      fail("unterminated processing instruction");
    pos_ = end + 2;
  }

  std::string parse_name() {
    if (!name_start(peek())) fail("expected name");
    std::size_t start = pos_;
    while (!eof() && name_char(xml_[pos_])) ++pos_;
    return std::string(xml_.substr(start, pos_ - start));
  }

  void check_entity() {
    // '&' consumed by the caller's loop position.
    static const std::string_view known[] = {"&lt;", "&gt;", "&amp;",
                                             "&apos;", "&quot;"};
    for (std::string_view e : known) {
      if (xml_.substr(pos_, e.size()) == e) {
        pos_ += e.size();
        return;
      }
    }
    fail("unsupported entity reference");
  }

  void add_label(const std::string& tag, NodeLabel l) {
    idx_.lists[tag].push_back(l);
    ++idx_.node_count;
    if (l.level > idx_.depth) idx_.depth = l.level;
  }

  void parse_element() {
    if (peek() != '<') fail("expected element");
    ++pos_;
    std::string tag = parse_name();
    std::uint32_t left = ++counter_;
    std::uint32_t level = ++depth_;
    std::size_t list_pos = idx_.lists[tag].size();
    idx_.lists[tag].push_back({left, 0, level});
    ++idx_.node_count;
    if (level > idx_.depth) idx_.depth = level;

    parse_attributes(level);

    bool self_closing = false;
    if (peek() == '/') {
      ++pos_;
      self_closing = true;
    }
    if (peek() != '>') fail("expected '>'");
    ++pos_;

    if (!self_closing) parse_content(tag);

    idx_.lists[tag][list_pos].right = ++counter_;
    --depth_;
  }

  void parse_attributes(std::uint32_t parent_level) {
    while (true) {
      bool saw_ws = false;
      while (!eof() && is_ws(xml_[pos_])) {
        ++pos_;
        saw_ws = true;
      }
      if (peek() == '>' || peek() == '/') return;
      if (!saw_ws) fail("expected whitespace before attribute");
      std::string name = parse_name();
      skip_ws();
      if (peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted value");
      ++pos_;
      while (!eof() && xml_[pos_] != quote) {
        if (xml_[pos_] == '<') fail("'<' in attribute value");
        if (xml_[pos_] == '&')
          check_entity();
        else
          ++pos_;
      }
      if (eof()) fail("unterminated attribute value");
      ++pos_;
      std::uint32_t left = ++counter_;
      std::uint32_t right = ++counter_;
      add_label("@" + name, {left, right, parent_level + 1});
    }
  }

  void parse_content(const std::string& open_tag) {
    while (true) {
      if (eof()) fail("unterminated element <" + open_tag + ">");
      char c = xml_[pos_];
      if (c == '<') {
        if (xml_.substr(pos_, 4) == "<!--") {
          skip_comment();
        } else if (xml_.substr(pos_, 2) == "<?") {
          skip_pi();
        } else if (xml_.substr(pos_, 2) == "</") {
          pos_ += 2;
          std::string name = parse_name();
          if (name != open_tag)
            fail("mismatched close tag </" + name + ">, expected </" +
                 open_tag + ">");
          skip_ws();
          if (peek() != '>') fail("expected '>'");
          ++pos_;
          return;
        } else if (xml_.substr(pos_, 2) == "<!") {
          fail("unsupported markup declaration");
        } else {
          parse_element();
        }
      } else if (c == '&') {
        check_entity();
      } else {
        ++pos_;  // text is skipped
      }
    }
  }
};

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint16_t u16() { return static_cast<std::uint16_t>(raw(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  bool exhausted() const { return pos_ == data_.size(); }

 private:
  std::uint64_t raw(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    pos_ += n;
    return v;
  }
  void need(std::size_t n) {
    if (pos_ + n > data_.size())
      throw IndexFormatError("truncated index file");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

constexpr char kIndexMagic[8] = {'T', 'P', 'Q', 'I', 'D', 'X', '1', '\0'};

}  // namespace detail

inline InvertedIndex parse_and_label(std::string_view xml) {
  return detail::XmlLabeler(xml).run();
}

inline std::string serialize_index(const InvertedIndex& idx) {
  std::string out(detail::kIndexMagic, sizeof detail::kIndexMagic);
  detail::put_u32(out, idx.node_count);
  detail::put_u32(out, idx.depth);
  detail::put_u32(out, static_cast<std::uint32_t>(idx.lists.size()));
  for (const auto& [tag, list] : idx.lists) {
    if (tag.size() > 0xffff) throw IndexFormatError("tag too long");
    detail::put_u16(out, static_cast<std::uint16_t>(tag.size()));
    out += tag;
    detail::put_u32(out, static_cast<std::uint32_t>(list.size()));
    for (const NodeLabel& l : list) {
      detail::put_u32(out, l.left);
      detail::put_u32(out, l.right);
      detail::put_u32(out, l.level);
    }
  }
  return out;
}

inline InvertedIndex deserialize_index(std::string_view data) {
  if (data.size() < sizeof detail::kIndexMagic ||
      std::memcmp(data.data(), detail::kIndexMagic,
                  sizeof detail::kIndexMagic) != 0)
    throw IndexFormatError("bad magic, not a TPQIDX1 file");
  detail::ByteReader r(data.substr(sizeof detail::kIndexMagic));
  InvertedIndex idx;
  idx.node_count = r.u32();
  idx.depth = r.u32();
  std::uint32_t tag_count = r.u32();
  for (std::uint32_t t = 0; t < tag_count; ++t) {
    std::string tag = r.bytes(r.u16());
    std::uint32_t len = r.u32();
    auto& list = idx.lists[tag];
    list.reserve(len);
    for (std::uint32_t i = 0; i < len; ++i) {
      NodeLabel l;
      l.left = r.u32();
      l.right = r.u32();
      l.level = r.u32();
      list.push_back(l);
    }
  }
  if (!r.exhausted()) throw IndexFormatError("trailing bytes in index file");
  idx.finalize();
  return idx;
}

inline void save_index(const InvertedIndex& idx, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::string data = serialize_index(idx);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline InvertedIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return deserialize_index(data);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tpq
