#pragma once

// Holistic twig join: one operator consuming the streams of all query
// nodes at once through a recursive head-selection function and a chain
// of linked stacks. Root-to-leaf path solutions are enumerated when a
// leaf is pushed (PC edges are tested right there); after the inputs are
// exhausted the per-leaf path solutions are merged into complete matches,
// projected to the output columns, sorted and deduplicated.
//
// Head selection treats every edge as AD, so for AD-only queries every
// pushed label takes part in at least one complete match; PC edges only
// tighten enumeration and merging.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tpq/labels.hpp"
#include "tpq/stream.hpp"

namespace tpq {

struct HolQueryNode {
  int qid = 0;       // originating query node id, identifies the column
  std::string tag;   // informational only
  bool output = false;
  Axis axis = Axis::AD;  // edge to parent
  int parent = -1;       // index into the node array, -1 for the root
};

struct HolisticSpec {
  std::vector<HolQueryNode> nodes;  // pre-order, parents before children
  std::vector<int> output_cols;     // node indices, pre-order
};

class HolisticJoinOp final : public TupleStream {
 public:
  HolisticJoinOp(HolisticSpec spec, std::vector<StreamPtr> inputs,
                 StatsContext& ctx,
                 std::vector<std::pair<int, NodeLabel>>* push_log = nullptr)
      : TupleStream(&ctx),
        spec_(std::move(spec)),
        inputs_(std::move(inputs)),
        push_log_(push_log) {
    int n = static_cast<int>(spec_.nodes.size());
    children_.resize(n);
    for (int i = 0; i < n; ++i)
      if (spec_.nodes[i].parent >= 0)
        children_[spec_.nodes[i].parent].push_back(i);
    stacks_.resize(n);
    paths_.resize(n);
  }

  int arity() const override {
    return static_cast<int>(spec_.output_cols.size());
  }

  std::size_t max_stack_depth() const { return max_stack_depth_; }

 protected:
  bool finished_impl() override {
    compute();
    return pos_ >= rows_.size();
  }
  const Tuple& current_impl() override {
    compute();
    return rows_[pos_];
  }
  void advance_impl() override { ++pos_; }

 private:
  struct StackEntry {
    NodeLabel label;
    int parent_link;  // top index of the parent stack at push time
  };

  static constexpr std::uint64_t kInf =
      std::numeric_limits<std::uint64_t>::max();

  std::uint64_t head_left(int i) {
    return inputs_[i]->finished() ? kInf : inputs_[i]->current()[0].left;
  }
  std::uint64_t head_right(int i) {
    return inputs_[i]->finished() ? kInf : inputs_[i]->current()[0].right;
  }

  // Returns the query node whose head should be acted on next. A node is
  // returned only when, with all edges read as AD, its head still has
  // potential matches below it; heads that provably cannot extend are
  // advanced past. Exhausted subtrees surface as kInf heads.
  int get_next(int q) {
    ctx_->on_getnext();
    if (children_[q].empty()) return q;
    std::uint64_t min_l = kInf, max_l = 0;
    int n_min = children_[q][0];
    for (int c : children_[q]) {
      int r = get_next(c);
      if (r != c && head_left(r) != kInf) return r;
      std::uint64_t hl = head_left(c);
      if (hl < min_l) {
        min_l = hl;
        n_min = c;
      }
      if (hl > max_l) max_l = hl;
    }
    while (!inputs_[q]->finished() && head_right(q) < max_l)
      inputs_[q]->advance();
    if (!inputs_[q]->finished() && head_left(q) < min_l) return q;
    return n_min;
  }

  void clean_stack(int q, std::uint32_t left) {
    while (!stacks_[q].empty() && stacks_[q].back().label.right < left) {
      ctx_->on_pop(1);
      stacks_[q].pop_back();
    }
  }

  void compute() {
    if (computed_) return;
    computed_ = true;
    while (true) {
      int g = get_next(0);
      if (head_left(g) == kInf) break;
      NodeLabel h = inputs_[g]->current()[0];
      int p = spec_.nodes[g].parent;
      if (p >= 0) clean_stack(p, h.left);
      if (p < 0 || !stacks_[p].empty()) {
        clean_stack(g, h.left);
        int link = p < 0 ? -1 : static_cast<int>(stacks_[p].size()) - 1;
        ctx_->on_push(1);
        stacks_[g].push_back(StackEntry{h, link});
        if (stacks_[g].size() > max_stack_depth_)
          max_stack_depth_ = stacks_[g].size();
        if (push_log_) push_log_->emplace_back(g, h);
        if (children_[g].empty()) {
          enumerate_paths(g);
          ctx_->on_pop(1);
          stacks_[g].pop_back();
        }
      }
      inputs_[g]->advance();
    }
    merge();
  }

  // All root-to-leaf solutions ending at the entry just pushed on leaf's
  // stack, built through the parent links.
  void enumerate_paths(int leaf) {
    chain_.clear();
    for (int x = leaf; x >= 0; x = spec_.nodes[x].parent) chain_.push_back(x);
    std::reverse(chain_.begin(), chain_.end());
    path_buf_.assign(chain_.size(), NodeLabel{});
    const StackEntry& e = stacks_[leaf].back();
    emit_chain(static_cast<int>(chain_.size()) - 1, e);
  }

  void emit_chain(int depth, const StackEntry& entry) {
    path_buf_[depth] = entry.label;
    if (depth == 0) {
      ctx_->on_buffer_add(path_buf_.size());
      paths_[chain_.back()].push_back(path_buf_);
      return;
    }
    int node = chain_[depth];
    int parent = chain_[depth - 1];
    for (int idx = 0; idx <= entry.parent_link; ++idx) {
      const StackEntry& pe = stacks_[parent][idx];
      if (!rel_ad(pe.label, entry.label)) continue;
      if (spec_.nodes[node].axis == Axis::PC &&
          pe.label.level + 1 != entry.label.level)
        continue;
      emit_chain(depth - 1, pe);
    }
  }

  // Trie over the root-to-leaf paths of one leaf, keyed by label left.
  struct Trie {
    std::map<std::uint32_t, std::pair<NodeLabel, Trie>> kids;
  };

  void merge() {
    int n = static_cast<int>(spec_.nodes.size());
    std::vector<int> leaves;
    for (int i = 0; i < n; ++i)
      if (children_[i].empty()) leaves.push_back(i);

    std::vector<Trie> tries(leaves.size());
    for (std::size_t li = 0; li < leaves.size(); ++li) {
      for (const auto& path : paths_[leaves[li]]) {
        Trie* t = &tries[li];
        for (const NodeLabel& l : path) {
          t = &t->kids.emplace(l.left, std::make_pair(l, Trie{}))
                   .first->second.second;
        }
      }
    }

    // leaves_under_[q] = positions (into `leaves`) of the leaves in q's
    // subtree; each constrains the label chosen for q.
    leaves_under_.assign(n, {});
    for (std::size_t li = 0; li < leaves.size(); ++li)
      for (int x = leaves[li]; x >= 0; x = spec_.nodes[x].parent)
        leaves_under_[x].push_back(static_cast<int>(li));

    std::vector<Trie*> cursors(leaves.size());
    for (std::size_t li = 0; li < leaves.size(); ++li)
      cursors[li] = &tries[li];
    Tuple assign(n);
    assemble(0, cursors, assign);

    std::sort(rows_.begin(), rows_.end(), lex_less);
    rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());

    paths_.clear();
    paths_.resize(n);
  }

  void assemble(int q, std::vector<Trie*>& cursors, Tuple& assign) {
    if (q == static_cast<int>(spec_.nodes.size())) {
      Tuple row;
      row.reserve(spec_.output_cols.size());
      for (int c : spec_.output_cols) row.push_back(assign[c]);
      rows_.push_back(std::move(row));
      return;
    }
    const std::vector<int>& lu = leaves_under_[q];
    int probe = lu[0];
    for (int li : lu)
      if (cursors[li]->kids.size() < cursors[probe]->kids.size()) probe = li;

    for (auto& [left, entry] : cursors[probe]->kids) {
      bool ok = true;
      for (int li : lu) {
        if (li == probe) continue;
        if (!cursors[li]->kids.count(left)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::vector<Trie*> saved;
      saved.reserve(lu.size());
      for (int li : lu) {
        saved.push_back(cursors[li]);
        cursors[li] = &cursors[li]->kids.at(left).second;
      }
      assign[q] = entry.first;
      assemble(q + 1, cursors, assign);
      for (std::size_t s = 0; s < lu.size(); ++s) cursors[lu[s]] = saved[s];
    }
  }

  HolisticSpec spec_;
  std::vector<StreamPtr> inputs_;
  std::vector<std::pair<int, NodeLabel>>* push_log_;

  std::vector<std::vector<int>> children_;
  std::vector<std::vector<StackEntry>> stacks_;
  std::vector<std::vector<std::vector<NodeLabel>>> paths_;  // per leaf
  std::vector<std::vector<int>> leaves_under_;
  std::vector<int> chain_;
  std::vector<NodeLabel> path_buf_;

  std::vector<Tuple> rows_;
  std::size_t pos_ = 0;
  bool computed_ = false;
  std::size_t max_stack_depth_ = 0;
};

}  // namespace tpq
