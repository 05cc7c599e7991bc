#pragma once

// Query core and constraining subqueries.
//
// A core node is an output node or any node on a path between two output
// nodes. The core is connected and rooted at the topmost core node. Every
// non-core node belongs to exactly one constraining subquery: the one of
// the core node its component hangs off (components above the core root
// belong to the core root's subquery).

#include <string>
#include <vector>

#include "tpq/query.hpp"

namespace tpq {

struct QueryDecomposition {
  const TwigQuery* query = nullptr;
  std::vector<bool> is_core;           // by node id
  const QueryNode* core_root = nullptr;
  std::vector<int> cons_of;            // node id -> core node id owning it
  std::vector<std::vector<const QueryNode*>> core_children;  // by node id

  // Every non-output core node has exactly one core child. Queries derived
  // from XQuery 'for' clauses always satisfy this (the lowest common
  // ancestor of two output nodes is an output node); binary-join planning
  // requires it.
  bool single_core_child = true;

  bool core(const QueryNode* q) const { return is_core[q->id]; }

  std::vector<const QueryNode*> core_nodes() const {
    std::vector<const QueryNode*> out;
    for (const QueryNode* q : query->nodes)
      if (is_core[q->id]) out.push_back(q);
    return out;
  }

  // Members of the constraining subquery of core node q, in pre-order.
  std::vector<const QueryNode*> cons_members(const QueryNode* q) const {
    std::vector<const QueryNode*> out;
    for (const QueryNode* x : query->nodes)
      if (cons_of[x->id] == q->id) out.push_back(x);
    return out;
  }
};

namespace detail {

inline void assign_component(QueryDecomposition& d, const QueryNode* q,
                             int owner) {
  d.cons_of[q->id] = owner;
  for (auto& c : q->children) assign_component(d, c.get(), owner);
}

}  // namespace detail

inline QueryDecomposition decompose(const TwigQuery& query) {
  QueryDecomposition d;
  d.query = &query;
  int n = query.n;
  d.is_core.assign(n, false);
  d.cons_of.assign(n, -1);
  d.core_children.assign(n, {});

  // Outputs inside each subtree, inclusive.
  std::vector<int> out_in(n, 0);
  for (auto it = query.nodes.rbegin(); it != query.nodes.rend(); ++it) {
    const QueryNode* q = *it;
    out_in[q->id] = q->is_output ? 1 : 0;
    for (auto& c : q->children) out_in[q->id] += out_in[c->id];
  }
  int total = query.n_o;

  for (const QueryNode* q : query.nodes) {
    // On a path between two outputs: outputs both below and elsewhere, or
    // outputs in two distinct child subtrees (q is their LCA).
    bool between = out_in[q->id] >= 1 && total - out_in[q->id] >= 1;
    int kids_with_output = 0;
    for (auto& c : q->children)
      if (out_in[c->id] >= 1) ++kids_with_output;
    d.is_core[q->id] = q->is_output || between || kids_with_output >= 2;
  }

  // The core is connected, so the first core node in pre-order is its root.
  for (const QueryNode* q : query.nodes) {
    if (d.is_core[q->id]) {
      d.core_root = q;
      break;
    }
  }

  for (const QueryNode* q : query.nodes) {
    if (!d.is_core[q->id]) continue;
    d.cons_of[q->id] = q->id;
    for (auto& c : q->children) {
      if (d.is_core[c->id])
        d.core_children[q->id].push_back(c.get());
      else
        detail::assign_component(d, c.get(), q->id);
    }
  }
  // Whatever is left is the component above the core root.
  for (const QueryNode* q : query.nodes)
    if (d.cons_of[q->id] < 0) d.cons_of[q->id] = d.core_root->id;

  for (const QueryNode* q : query.nodes) {
    if (d.is_core[q->id] && !q->is_output &&
        d.core_children[q->id].size() != 1)
      d.single_core_child = false;
  }
  return d;
}

// Root of the constraining subquery of core node q: q itself, except for
// the core root whose subquery extends up to the query root.
inline const QueryNode* cons_root(const QueryDecomposition& d,
                                  const QueryNode* q) {
  if (q != d.core_root) return q;
  return d.query->root.get();
}

namespace detail {

inline bool in_cons(const QueryDecomposition& d, const QueryNode* c,
                    const QueryNode* constrained) {
  if (c == constrained) return true;
  return !d.is_core[c->id] && d.cons_of[c->id] == constrained->id;
}

// The chain leading down to the constrained node renders as steps, every
// filtering child inside one predicate group.
inline void render_cons_node(const QueryDecomposition& d, const QueryNode* x,
                             const QueryNode* constrained, std::string& out) {
  if (x == constrained) out += '$';
  out += x->tag;
  const QueryNode* chain = nullptr;
  std::vector<const QueryNode*> filters;
  for (auto& c : x->children) {
    if (!in_cons(d, c.get(), constrained)) continue;
    if (x != constrained && is_query_ancestor_or_self(c.get(), constrained))
      chain = c.get();
    else
      filters.push_back(c.get());
  }
  if (!filters.empty()) {
    out += '[';
    for (std::size_t i = 0; i < filters.size(); ++i) {
      if (i) out += " and ";
      out += '.';
      out += filters[i]->edge_to_parent == Axis::AD ? "//" : "/";
      render_cons_node(d, filters[i], constrained, out);
    }
    out += ']';
  }
  if (chain) {
    out += chain->edge_to_parent == Axis::AD ? "//" : "/";
    render_cons_node(d, chain, constrained, out);
  }
}

}  // namespace detail

// Renders the constraining subquery of core node q as TPQ text with the
// constrained node marked '$'. The leading axis appears only when the
// subquery starts at the query root, where it is the virtual-root edge;
// otherwise the subquery is relative to its own root.
inline std::string render_cons(const QueryDecomposition& d,
                               const QueryNode* q) {
  const QueryNode* root = cons_root(d, q);
  std::string out;
  if (root == d.query->root.get())
    out += d.query->root_axis == Axis::AD ? "//" : "/";
  detail::render_cons_node(d, root, q, out);
  return out;
}

}  // namespace tpq
