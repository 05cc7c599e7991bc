#pragma once

// Pull streams of label tuples. Every operator and scan implements this
// interface; advance() is counted centrally so the per-query read counter
// covers the whole pipeline.

#include <cassert>
#include <memory>
#include <vector>

#include "tpq/labels.hpp"
#include "tpq/stats.hpp"

namespace tpq {

class TupleStream {
 public:
  explicit TupleStream(StatsContext* ctx) : ctx_(ctx) {}
  virtual ~TupleStream() = default;

  virtual int arity() const = 0;

  bool finished() { return finished_impl(); }

  // Valid only while !finished(). The reference is invalidated by advance().
  const Tuple& current() { return current_impl(); }

  void advance() {
    if (ctx_) ctx_->on_advance();
    advance_impl();
  }

 protected:
  virtual bool finished_impl() = 0;
  virtual const Tuple& current_impl() = 0;
  virtual void advance_impl() = 0;

  StatsContext* ctx_;
};

using StreamPtr = std::unique_ptr<TupleStream>;

// Materialized table, used by tests and by blocking operators.
class VectorStream final : public TupleStream {
 public:
  VectorStream(std::vector<Tuple> rows, int arity, StatsContext* ctx = nullptr)
      : TupleStream(ctx), rows_(std::move(rows)), arity_(arity) {}

  int arity() const override { return arity_; }

 protected:
  bool finished_impl() override { return pos_ >= rows_.size(); }
  const Tuple& current_impl() override { return rows_[pos_]; }
  void advance_impl() override { ++pos_; }

 private:
  std::vector<Tuple> rows_;
  int arity_;
  std::size_t pos_ = 0;
};

// Scan over one inverted list; optionally restricted to level-1 labels
// (the parent-child edge from the virtual document root).
class IndexScanStream final : public TupleStream {
 public:
  IndexScanStream(std::span<const NodeLabel> list, bool level_one_only,
                  StatsContext* ctx)
      : TupleStream(ctx), list_(list), level_one_only_(level_one_only) {
    cur_.resize(1);
    skip_filtered();
    load();
  }

  int arity() const override { return 1; }

 protected:
  bool finished_impl() override { return pos_ >= list_.size(); }
  const Tuple& current_impl() override { return cur_; }
  void advance_impl() override {
    ++pos_;
    skip_filtered();
    load();
  }

 private:
  void skip_filtered() {
    if (!level_one_only_) return;
    while (pos_ < list_.size() && list_[pos_].level != 1) ++pos_;
  }
  void load() {
    if (pos_ < list_.size()) cur_[0] = list_[pos_];
  }

  std::span<const NodeLabel> list_;
  bool level_one_only_;
  std::size_t pos_ = 0;
  Tuple cur_;
};

inline std::vector<Tuple> drain(TupleStream& s) {
  std::vector<Tuple> rows;
  while (!s.finished()) {
    rows.push_back(s.current());
    s.advance();
  }
  return rows;
}

}  // namespace tpq
