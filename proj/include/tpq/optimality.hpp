#pragma once

// Static optimality prediction for the binary-join engine: decides from
// the query shape and per-tag recursiveness whether the FP plan is
// guaranteed linear time in input+output and linear space in document
// depth.
//
// Single output node: the plan is all semi-joins; the only hazard is an
// ancestor-filtering PC semi-join over a recursive stream, i.e. a PC edge
// off the root-to-output path whose parent tag is recursive.
//
// Multiple output nodes: additionally the core must be a path and core
// tags non-recursive, otherwise partial joins see repeating or recursive
// ancestor inputs.

#include <string>
#include <vector>

#include "tpq/decompose.hpp"
#include "tpq/index.hpp"
#include "tpq/query.hpp"

namespace tpq {

struct OptimalityReport {
  bool optimal = true;
  std::vector<std::string> violated_conditions;

  void violate(std::string what) {
    optimal = false;
    violated_conditions.push_back(std::move(what));
  }
};

namespace detail {

// Edges with: PC relationship, not on the path from `top` to `target`,
// and a recursive parent stream. `top` is the root of the constraining
// subquery, `target` its constrained node.
inline void check_cons_edges(const QueryDecomposition& d, const QueryNode* top,
                             const QueryNode* target,
                             const InvertedIndex& idx, const char* clause,
                             OptimalityReport& rep) {
  // Walk the subquery: target plus the non-core component(s) owned by it.
  for (const QueryNode* x : d.query->nodes) {
    bool member = x == target ||
                  (!d.is_core[x->id] && d.cons_of[x->id] == target->id);
    if (!member || x == top) continue;
    const QueryNode* parent = x->parent;
    if (x->edge_to_parent != Axis::PC) continue;
    if (is_query_ancestor_or_self(x, target)) continue;  // on the path
    if (!idx.is_recursive(parent->tag)) continue;
    rep.violate(std::string(clause) + ": PC edge " + parent->tag + "/" +
                x->tag + " off the path to '" + target->tag +
                "' with recursive parent stream");
  }
}

}  // namespace detail

inline OptimalityReport predict_optimality(const TwigQuery& q,
                                           const QueryDecomposition& d,
                                           const InvertedIndex& idx) {
  OptimalityReport rep;
  if (q.n_o == 1) {
    detail::check_cons_edges(d, q.root.get(), d.core_root, idx, "theorem-1",
                             rep);
    return rep;
  }
  for (const QueryNode* c : d.core_nodes()) {
    detail::check_cons_edges(d, cons_root(d, c), c, idx,
                             "theorem-2(i)/lemma-3", rep);
  }
  for (const QueryNode* c : d.core_nodes()) {
    if (d.core_children[c->id].size() > 1) {
      rep.violate("theorem-2(ii): core branches at '" + c->tag + "'");
    }
    if (idx.is_recursive(c->tag)) {
      rep.violate("theorem-2(iii): core node tag '" + c->tag +
                  "' has a recursive stream");
    }
  }
  return rep;
}

inline OptimalityReport predict_optimality(const TwigQuery& q,
                                           const InvertedIndex& idx) {
  QueryDecomposition d = decompose(q);
  return predict_optimality(q, d, idx);
}

}  // namespace tpq
