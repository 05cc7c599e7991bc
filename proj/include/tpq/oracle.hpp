#pragma once

// Brute-force reference evaluator. Backtracks over the query tree in
// pre-order, binding each node to labels inside its parent's interval,
// then projects, sorts and deduplicates. Ground truth for everything
// else; meant for documents up to a few hundred nodes.

#include <algorithm>
#include <vector>

#include "tpq/index.hpp"
#include "tpq/query.hpp"

namespace tpq {

namespace detail {

struct OracleRun {
  const TwigQuery& q;
  const InvertedIndex& idx;
  std::vector<NodeLabel> binding;
  std::vector<Tuple> rows;

  void assign(std::size_t k) {
    if (k == q.nodes.size()) {
      Tuple row;
      for (const QueryNode* x : q.nodes)
        if (x->is_output) row.push_back(binding[x->id]);
      rows.push_back(std::move(row));
      return;
    }
    const QueryNode* x = q.nodes[k];
    auto list = idx.list(x->tag);
    if (!x->parent) {
      for (const NodeLabel& l : list) {
        if (q.root_axis == Axis::PC && l.level != 1) continue;
        binding[x->id] = l;
        assign(k + 1);
      }
      return;
    }
    const NodeLabel& p = binding[x->parent->id];
    auto it = std::lower_bound(
        list.begin(), list.end(), p.left,
        [](const NodeLabel& l, std::uint32_t v) { return l.left <= v; });
    for (; it != list.end() && it->left < p.right; ++it) {
      if (!rel(x->edge_to_parent, p, *it)) continue;
      binding[x->id] = *it;
      assign(k + 1);
    }
  }
};

}  // namespace detail

inline std::vector<Tuple> brute_force(const TwigQuery& q,
                                      const InvertedIndex& idx) {
  detail::OracleRun run{q, idx, std::vector<NodeLabel>(q.n), {}};
  run.assign(0);
  std::sort(run.rows.begin(), run.rows.end(), lex_less);
  run.rows.erase(std::unique(run.rows.begin(), run.rows.end()),
                 run.rows.end());
  return run.rows;
}

// Complete matches: every query node treated as output, one column per
// node in pre-order. Used by participation and optimality tests.
inline std::vector<Tuple> brute_force_complete(const TwigQuery& q,
                                               const InvertedIndex& idx) {
  TwigQuery all = clone_query(q);
  for (QueryNode* x : all.nodes) x->is_output = true;
  all.refresh();
  return brute_force(all, idx);
}

}  // namespace tpq
