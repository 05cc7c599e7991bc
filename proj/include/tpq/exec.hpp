#pragma once

// Plan executor: lowers a PlanNode tree onto the pull operators, drains
// the root and reports the counters. With debug assertions on, every
// operator is wrapped by an order check that verifies its declared sort
// key over the full output.

#include <chrono>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tpq/binjoin.hpp"
#include "tpq/holjoin.hpp"
#include "tpq/index.hpp"
#include "tpq/plan.hpp"
#include "tpq/stream.hpp"

namespace tpq {

struct ExecOptions {
  bool debug_asserts = false;
  // When set, the holistic join logs every (node index, label) push.
  std::vector<std::pair<int, NodeLabel>>* push_log = nullptr;
};

struct ExecResult {
  std::vector<Tuple> rows;
  ExecStats stats;
};

namespace detail {

class OrderCheckStream final : public TupleStream {
 public:
  OrderCheckStream(StreamPtr in, std::vector<int> key)
      : TupleStream(nullptr), in_(std::move(in)), key_(std::move(key)) {}

  int arity() const override { return in_->arity(); }

 protected:
  bool finished_impl() override { return in_->finished(); }
  const Tuple& current_impl() override {
    const Tuple& t = in_->current();
    if (!checked_) {
      if (have_last_) verify(last_, t);
      checked_ = true;
    }
    return t;
  }
  void advance_impl() override {
    last_ = in_->current();
    have_last_ = true;
    checked_ = false;
    in_->advance();
  }

 private:
  void verify(const Tuple& prev, const Tuple& cur) const {
    for (int col : key_) {
      std::uint32_t p = prev[col - 1].left, c = cur[col - 1].left;
      if (p < c) return;
      if (p > c)
        throw std::logic_error("operator output violates its sort contract");
    }
  }

  StreamPtr in_;
  std::vector<int> key_;
  Tuple last_;
  bool have_last_ = false;
  bool checked_ = false;
};

inline StreamPtr instantiate(const PlanNode& p, const InvertedIndex& idx,
                             StatsContext& ctx, const ExecOptions& opt) {
  StreamPtr s;
  switch (p.kind) {
    case PlanKind::IndexScan:
      s = std::make_unique<IndexScanStream>(idx.list(p.tag), p.level_one,
                                            &ctx);
      break;
    case PlanKind::SemiJoinAncAD:
      s = std::make_unique<SemiJoinAncADOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), ctx);
      break;
    case PlanKind::SemiJoinDescAD:
      s = std::make_unique<SemiJoinDescADOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), ctx);
      break;
    case PlanKind::SemiJoinAncPC:
      s = std::make_unique<SemiJoinAncPCOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), ctx);
      break;
    case PlanKind::SemiJoinDescPC:
      s = std::make_unique<SemiJoinDescPCOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), ctx);
      break;
    case PlanKind::StackTreeAnc:
    case PlanKind::StackTreeAncSrt:
      s = std::make_unique<StackTreeAncOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), p.spec,
          p.kind == PlanKind::StackTreeAncSrt, ctx);
      break;
    case PlanKind::StackTreeDesc:
      s = std::make_unique<StackTreeDescOp>(
          instantiate(*p.children[0], idx, ctx, opt),
          instantiate(*p.children[1], idx, ctx, opt), p.spec, ctx);
      break;
    case PlanKind::HolisticJoin: {
      std::vector<StreamPtr> ins;
      ins.reserve(p.children.size());
      for (const auto& c : p.children)
        ins.push_back(instantiate(*c, idx, ctx, opt));
      s = std::make_unique<HolisticJoinOp>(p.hol, std::move(ins), ctx,
                                           opt.push_log);
      break;
    }
    case PlanKind::Project:
      s = std::make_unique<ProjectOp>(
          instantiate(*p.children[0], idx, ctx, opt), p.project_cols, ctx);
      break;
    case PlanKind::Distinct:
      s = std::make_unique<DistinctOp>(
          instantiate(*p.children[0], idx, ctx, opt), ctx);
      break;
  }
  if (ctx.debug_asserts && !p.sort_key.empty())
    s = std::make_unique<OrderCheckStream>(std::move(s), p.sort_key);
  return s;
}

inline bool env_debug_asserts() {
  const char* v = std::getenv("TPQ_DEBUG_ASSERTS");
  return v && v[0] == '1';
}

}  // namespace detail

inline ExecResult execute(const PlanNode& plan, const InvertedIndex& idx,
                          ExecOptions opt = {}) {
  StatsContext ctx;
  ctx.debug_asserts = opt.debug_asserts || detail::env_debug_asserts();
  auto t0 = std::chrono::steady_clock::now();
  StreamPtr root = detail::instantiate(plan, idx, ctx, opt);
  ExecResult res;
  while (!root->finished()) {
    res.rows.push_back(root->current());
    root->advance();
  }
  auto t1 = std::chrono::steady_clock::now();
  res.stats = ctx.stats;
  res.stats.result_rows = res.rows.size();
  res.stats.wall_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  return res;
}

}  // namespace tpq
