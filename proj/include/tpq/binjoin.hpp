#pragma once

// Binary structural join operators, each a pull stream.
//
// Partial joins (StackTreeDesc / StackTreeAnc / StackTreeAncSrt) merge two
// tuple tables through a stack of ancestor-side tuples whose join-column
// labels form a nesting chain. The ancestor-sorted variants buffer joined
// tuples in per-entry self- and inherited-lists; tuples joined with the
// stack bottom are emitted directly, so the lists stay empty whenever the
// ancestor input is simple. Ancestor tuples that end before the next
// descendant starts are consumed without a push.
//
// Semi-joins filter one side. The AD variants run without any stack; the
// PC variants keep a stack of candidate ancestors. The ancestor-filtering
// PC variant may resolve an inner ancestor before an outer one, so
// resolved ancestors are buffered per entry and released in document
// order.

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tpq/labels.hpp"
#include "tpq/stream.hpp"

namespace tpq {

struct JoinSpec {
  std::vector<bool> mask_a;  // projected columns of the ancestor input
  std::vector<bool> mask_d;  // projected columns of the descendant input
  int i = 1;                 // join column in T_a, 1-based
  int j = 1;                 // primary join column in T_d, 1-based
  int k = 0;                 // secondary join column in T_d, 0 = none
  Axis alpha = Axis::AD;
};

inline int mask_popcount(const std::vector<bool>& m) {
  int c = 0;
  for (bool b : m) c += b;
  return c;
}

namespace detail {

inline Tuple project_pair(const std::vector<bool>& ma, const Tuple& at,
                          const std::vector<bool>& md, const Tuple& dt) {
  Tuple out;
  out.reserve(mask_popcount(ma) + mask_popcount(md));
  for (std::size_t c = 0; c < ma.size(); ++c)
    if (ma[c]) out.push_back(at[c]);
  for (std::size_t c = 0; c < md.size(); ++c)
    if (md[c]) out.push_back(dt[c]);
  return out;
}

// Buffered-output pull operator: step() makes one unit of progress and
// may queue output rows.
class QueueOperator : public TupleStream {
 public:
  QueueOperator(StatsContext& ctx, int arity)
      : TupleStream(&ctx), arity_(arity) {}

  int arity() const override { return arity_; }

 protected:
  bool finished_impl() override {
    fill();
    return out_.empty() && done_;
  }
  const Tuple& current_impl() override {
    fill();
    return out_.front();
  }
  void advance_impl() override {
    fill();
    out_.pop_front();
  }

  void fill() {
    while (out_.empty() && !done_) step();
  }

  virtual void step() = 0;

  std::deque<Tuple> out_;
  bool done_ = false;
  int arity_;
};

}  // namespace detail

// Descendant-sorted partial join. Output: M_a(a) ++ M_d(d) for every pair
// satisfying alpha between a[i] and d[j], ordered by the descendant join
// column, ties in ancestor arrival order.
class StackTreeDescOp final : public detail::QueueOperator {
 public:
  StackTreeDescOp(StreamPtr a, StreamPtr d, JoinSpec spec, StatsContext& ctx)
      : QueueOperator(ctx,
                      mask_popcount(spec.mask_a) + mask_popcount(spec.mask_d)),
        a_(std::move(a)),
        d_(std::move(d)),
        spec_(std::move(spec)),
        ic_(spec_.i - 1),
        jc_(spec_.j - 1) {}

 private:
  void step() override {
    if (d_->finished()) {
      while (!stack_.empty()) pop_top();
      done_ = true;
      return;
    }
    bool a_ok = !a_->finished();
    if (!a_ok && stack_.empty()) {
      done_ = true;
      return;
    }
    std::uint32_t dl = d_->current()[jc_].left;
    std::uint32_t minl = dl;
    if (a_ok) minl = std::min(minl, a_->current()[ic_].left);
    while (!stack_.empty() && stack_.back()[ic_].right < minl) pop_top();

    if (a_ok && a_->current()[ic_].left < dl) {
      const Tuple& at = a_->current();
      // Dead tuples are consumed without a push; a tuple equal to the top
      // would only duplicate rows (the result is a set) and is collapsed.
      if (at[ic_].right > dl && (stack_.empty() || stack_.back() != at)) {
        stack_.push_back(at);
        ctx_->on_push(at.size());
      }
      a_->advance();
    } else {
      const Tuple& dt = d_->current();
      // A duplicate of the tuple just joined meets an unchanged stack and
      // would repeat its rows; collapsed, like the ancestor side.
      if (!have_last_d_ || dt != last_d_) {
        for (const Tuple& at : stack_) {  // bottom-up
          if (spec_.alpha == Axis::PC &&
              at[ic_].level + 1 != dt[jc_].level)
            continue;
          out_.push_back(
              detail::project_pair(spec_.mask_a, at, spec_.mask_d, dt));
        }
        last_d_ = dt;
        have_last_d_ = true;
      }
      d_->advance();
    }
  }

  void pop_top() {
    ctx_->on_pop(stack_.back().size());
    stack_.pop_back();
  }

  StreamPtr a_, d_;
  JoinSpec spec_;
  int ic_, jc_;
  std::vector<Tuple> stack_;
  Tuple last_d_;
  bool have_last_d_ = false;
};

// Ancestor-sorted partial join, with the optional secondary relationship
// test of the Srt variant: when `secondary` is set, the join itself is
// always AD between columns i and j, and alpha is tested between columns
// i and k instead.
class StackTreeAncOp final : public detail::QueueOperator {
 public:
  StackTreeAncOp(StreamPtr a, StreamPtr d, JoinSpec spec, bool secondary,
                 StatsContext& ctx)
      : QueueOperator(ctx,
                      mask_popcount(spec.mask_a) + mask_popcount(spec.mask_d)),
        a_(std::move(a)),
        d_(std::move(d)),
        spec_(std::move(spec)),
        secondary_(secondary),
        ic_(spec_.i - 1),
        jc_(spec_.j - 1),
        kc_(spec_.k - 1) {
    if (secondary_ && spec_.k < 1)
      throw std::invalid_argument("StackTreeAncSrt: missing column k");
  }

 private:
  struct Entry {
    Tuple tup;
    std::vector<Tuple> self;
    std::vector<Tuple> inherited;
  };

  void step() override {
    if (d_->finished()) {
      while (!stack_.empty()) pop_top();
      done_ = true;
      return;
    }
    bool a_ok = !a_->finished();
    if (!a_ok && stack_.empty()) {
      done_ = true;
      return;
    }
    std::uint32_t dl = d_->current()[jc_].left;
    std::uint32_t minl = dl;
    if (a_ok) minl = std::min(minl, a_->current()[ic_].left);
    while (!stack_.empty() && stack_.back().tup[ic_].right < minl) pop_top();

    if (a_ok && a_->current()[ic_].left < dl) {
      const Tuple& at = a_->current();
      // Same dead-skip and equal-top collapse as the descendant variant.
      if (at[ic_].right > dl &&
          (stack_.empty() || stack_.back().tup != at)) {
        ctx_->on_push(at.size());
        stack_.push_back(Entry{at, {}, {}});
      }
      a_->advance();
    } else {
      const Tuple& dt = d_->current();
      if (!have_last_d_ || dt != last_d_) {
        for (std::size_t s = 0; s < stack_.size(); ++s) {
          Entry& e = stack_[s];
          if (secondary_) {
            if (!rel(spec_.alpha, e.tup[ic_], dt[kc_])) continue;
          } else if (spec_.alpha == Axis::PC &&
                     e.tup[ic_].level + 1 != dt[jc_].level) {
            continue;
          }
          Tuple t =
              detail::project_pair(spec_.mask_a, e.tup, spec_.mask_d, dt);
          if (s == 0) {
            out_.push_back(std::move(t));
          } else {
            ctx_->on_list_add(1, static_cast<std::uint64_t>(arity_));
            e.self.push_back(std::move(t));
          }
        }
        last_d_ = dt;
        have_last_d_ = true;
      }
      d_->advance();
    }
  }

  void pop_top() {
    Entry e = std::move(stack_.back());
    stack_.pop_back();
    ctx_->on_pop(e.tup.size());
    if (stack_.empty()) {
      release(e.self);
      release(e.inherited);
    } else {
      Entry& below = stack_.back();
      std::move(e.self.begin(), e.self.end(),
                std::back_inserter(below.inherited));
      std::move(e.inherited.begin(), e.inherited.end(),
                std::back_inserter(below.inherited));
    }
  }

  void release(std::vector<Tuple>& list) {
    for (Tuple& t : list) {
      ctx_->on_list_remove(1, static_cast<std::uint64_t>(arity_));
      out_.push_back(std::move(t));
    }
    list.clear();
  }

  StreamPtr a_, d_;
  JoinSpec spec_;
  bool secondary_;
  int ic_, jc_, kc_;
  std::vector<Entry> stack_;
  Tuple last_d_;
  bool have_last_d_ = false;
};

// All a in T_a with an AD descendant in T_d; stack-less three-way merge.
class SemiJoinAncADOp final : public detail::QueueOperator {
 public:
  SemiJoinAncADOp(StreamPtr a, StreamPtr d, StatsContext& ctx)
      : QueueOperator(ctx, 1), a_(std::move(a)), d_(std::move(d)) {}

 private:
  void step() override {
    if (a_->finished() || d_->finished()) {
      done_ = true;
      return;
    }
    const NodeLabel& a = a_->current()[0];
    const NodeLabel& d = d_->current()[0];
    if (a.left >= d.left) {
      d_->advance();
    } else if (a.right > d.right) {
      out_.push_back(a_->current());
      a_->advance();
    } else {
      a_->advance();
    }
  }

  StreamPtr a_, d_;
};

// All d in T_d with an AD ancestor in T_a; stack-less.
class SemiJoinDescADOp final : public detail::QueueOperator {
 public:
  SemiJoinDescADOp(StreamPtr a, StreamPtr d, StatsContext& ctx)
      : QueueOperator(ctx, 1), a_(std::move(a)), d_(std::move(d)) {}

 private:
  void step() override {
    if (d_->finished() || a_->finished()) {
      done_ = true;
      return;
    }
    const NodeLabel& a = a_->current()[0];
    const NodeLabel& d = d_->current()[0];
    if (rel_ad(a, d)) {
      out_.push_back(d_->current());
      d_->advance();
    } else if (a.left >= d.left) {
      // No current or later ancestor can cover d.
      d_->advance();
    } else {
      a_->advance();
    }
  }

  StreamPtr a_, d_;
};

// All d in T_d with a parent in T_a; stack of candidate ancestors.
class SemiJoinDescPCOp final : public detail::QueueOperator {
 public:
  SemiJoinDescPCOp(StreamPtr a, StreamPtr d, StatsContext& ctx)
      : QueueOperator(ctx, 1), a_(std::move(a)), d_(std::move(d)) {}

 private:
  void step() override {
    if (d_->finished()) {
      while (!stack_.empty()) pop_top();
      done_ = true;
      return;
    }
    bool a_ok = !a_->finished();
    if (!a_ok && stack_.empty()) {
      done_ = true;
      return;
    }
    std::uint32_t dl = d_->current()[0].left;
    std::uint32_t minl = dl;
    if (a_ok) minl = std::min(minl, a_->current()[0].left);
    while (!stack_.empty() && stack_.back().right < minl) pop_top();

    if (a_ok && a_->current()[0].left < dl) {
      const NodeLabel& a = a_->current()[0];
      if (a.right > dl) {
        ctx_->on_push(1);
        stack_.push_back(a);
      }
      a_->advance();
    } else {
      std::uint32_t lv = d_->current()[0].level;
      for (const NodeLabel& e : stack_) {
        if (e.level + 1 == lv) {
          out_.push_back(d_->current());
          break;
        }
      }
      d_->advance();
    }
  }

  void pop_top() {
    ctx_->on_pop(1);
    stack_.pop_back();
  }

  StreamPtr a_, d_;
  std::vector<NodeLabel> stack_;
};

// All a in T_a with a child in T_d, in document order. A matched inner
// ancestor must wait for outer entries still on the stack, so matches are
// buffered per entry and released on pop; the stack bottom is released
// immediately.
class SemiJoinAncPCOp final : public detail::QueueOperator {
 public:
  SemiJoinAncPCOp(StreamPtr a, StreamPtr d, StatsContext& ctx)
      : QueueOperator(ctx, 1), a_(std::move(a)), d_(std::move(d)) {}

 private:
  struct Entry {
    NodeLabel a;
    bool matched = false;
    bool emitted = false;
    std::vector<NodeLabel> pending;
  };

  void step() override {
    if (d_->finished()) {
      while (!stack_.empty()) pop_top();
      done_ = true;
      return;
    }
    bool a_ok = !a_->finished();
    if (!a_ok && stack_.empty()) {
      done_ = true;
      return;
    }
    std::uint32_t dl = d_->current()[0].left;
    std::uint32_t minl = dl;
    if (a_ok) minl = std::min(minl, a_->current()[0].left);
    while (!stack_.empty() && stack_.back().a.right < minl) pop_top();

    if (a_ok && a_->current()[0].left < dl) {
      const NodeLabel& a = a_->current()[0];
      if (a.right > dl) {
        ctx_->on_push(1);
        Entry e;
        e.a = a;
        stack_.push_back(std::move(e));
      }
      a_->advance();
    } else {
      std::uint32_t lv = d_->current()[0].level;
      for (std::size_t s = 0; s < stack_.size(); ++s) {
        Entry& e = stack_[s];
        if (e.a.level + 1 != lv) continue;
        if (!e.matched) {
          e.matched = true;
          if (s == 0) {
            out_.push_back(Tuple{e.a});
            e.emitted = true;
          }
        }
        break;
      }
      d_->advance();
    }
  }

  void pop_top() {
    Entry e = std::move(stack_.back());
    stack_.pop_back();
    ctx_->on_pop(1);
    bool carry_own = e.matched && !e.emitted;
    if (stack_.empty()) {
      if (carry_own) out_.push_back(Tuple{e.a});
      for (const NodeLabel& l : e.pending) {
        ctx_->on_list_remove(1, 1);
        out_.push_back(Tuple{l});
      }
    } else {
      Entry& below = stack_.back();
      if (carry_own) {
        ctx_->on_list_add(1, 1);
        below.pending.push_back(e.a);
      }
      std::move(e.pending.begin(), e.pending.end(),
                std::back_inserter(below.pending));
    }
  }

  StreamPtr a_, d_;
  std::vector<Entry> stack_;
};

// Streaming duplicate elimination over sorted input.
class DistinctOp final : public detail::QueueOperator {
 public:
  DistinctOp(StreamPtr in, StatsContext& ctx)
      : QueueOperator(ctx, in->arity()), in_(std::move(in)) {}

 private:
  void step() override {
    while (!in_->finished()) {
      const Tuple& t = in_->current();
      if (!have_last_ || t != last_) {
        last_ = t;
        have_last_ = true;
        out_.push_back(t);
        in_->advance();
        return;
      }
      in_->advance();
    }
    done_ = true;
  }

  StreamPtr in_;
  Tuple last_;
  bool have_last_ = false;
};

// Column projection; `cols` are 1-based input positions in output order.
class ProjectOp final : public detail::QueueOperator {
 public:
  ProjectOp(StreamPtr in, std::vector<int> cols, StatsContext& ctx)
      : QueueOperator(ctx, static_cast<int>(cols.size())),
        in_(std::move(in)),
        cols_(std::move(cols)) {}

 private:
  void step() override {
    if (in_->finished()) {
      done_ = true;
      return;
    }
    const Tuple& t = in_->current();
    Tuple o;
    o.reserve(cols_.size());
    for (int c : cols_) o.push_back(t[c - 1]);
    out_.push_back(std::move(o));
    in_->advance();
  }

  StreamPtr in_;
  std::vector<int> cols_;
};

}  // namespace tpq
