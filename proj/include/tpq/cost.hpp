#pragma once

// Selectivity metrics and the threshold rule choosing between the three
// engines:
//
//   if sigma < Sigma: HJ   else if sigma_core > Sigma_core: BJ   else: CJ
//
// sigma = N_out / N_in, where N_out counts distinct data nodes anywhere in
// the result's output columns and N_in sums the stream sizes of the output
// query nodes. sigma_core is the same metric for the query core evaluated
// as a standalone query. The exact provider measures both by running the
// binary-join engine once; the heuristic provider estimates from stream
// sizes alone.

#include <set>
#include <vector>

#include "tpq/decompose.hpp"
#include "tpq/exec.hpp"
#include "tpq/index.hpp"
#include "tpq/plan.hpp"
#include "tpq/query.hpp"

namespace tpq {

struct CostInputs {
  double sigma = 0.0;
  double sigma_core = 0.0;
  double threshold_sigma = 0.001;       // Sigma
  double threshold_sigma_core = 0.1;    // Sigma_core
  double rho = 0.0;
};

inline EngineKind select_engine_cbj(const CostInputs& c) {
  if (c.sigma < c.threshold_sigma) return EngineKind::HJ;
  if (c.sigma_core > c.threshold_sigma_core) return EngineKind::BJ;
  return EngineKind::CJ;
}

inline double compute_selectivity(const TwigQuery& q,
                                  const std::vector<Tuple>& rows,
                                  const InvertedIndex& idx) {
  std::uint64_t n_in = 0;
  for (const QueryNode* x : q.nodes)
    if (x->is_output) n_in += idx.list(x->tag).size();
  if (n_in == 0) return 0.0;
  std::set<std::uint32_t> distinct;  // lefts are unique per document
  for (const Tuple& t : rows)
    for (const NodeLabel& l : t) distinct.insert(l.left);
  return static_cast<double>(distinct.size()) / static_cast<double>(n_in);
}

inline double compute_output_ratio(const TwigQuery& q) {
  return static_cast<double>(q.n_o) / static_cast<double>(q.n);
}

// The query core as a standalone query: core nodes and core edges only,
// original output flags, unconstrained from the document root.
inline TwigQuery core_as_query(const TwigQuery& q,
                               const QueryDecomposition& d) {
  if (d.query != &q)
    throw std::invalid_argument("core_as_query: decomposition mismatch");
  struct Builder {
    const QueryDecomposition& d;
    std::unique_ptr<QueryNode> build(const QueryNode* x) {
      auto n = std::make_unique<QueryNode>();
      n->tag = x->tag;
      n->is_output = x->is_output;
      n->edge_to_parent = x->edge_to_parent;
      for (const QueryNode* c : d.core_children[x->id])
        n->children.push_back(build(c));
      return n;
    }
  } b{d};
  TwigQuery core;
  core.root_axis = Axis::AD;
  core.root = b.build(d.core_root);
  core.refresh();
  return core;
}

struct SelectivityEstimate {
  double sigma = 0.0;
  double sigma_core = 0.0;
};

// Measures both selectivities by executing the binary-join plans.
inline SelectivityEstimate estimate_exact(const TwigQuery& q,
                                          const InvertedIndex& idx) {
  SelectivityEstimate est;
  PlanPtr p = build_plan(q, EngineKind::BJ);
  est.sigma = compute_selectivity(q, execute(*p, idx).rows, idx);
  QueryDecomposition d = decompose(q);
  TwigQuery core = core_as_query(q, d);
  PlanPtr pc = build_plan(core, EngineKind::BJ);
  est.sigma_core = compute_selectivity(core, execute(*pc, idx).rows, idx);
  return est;
}

// Estimates N_out by the smallest involved stream: min / sum over the
// output-node streams for sigma, over the core-node streams for
// sigma_core.
inline SelectivityEstimate estimate_heuristic(const TwigQuery& q,
                                              const InvertedIndex& idx) {
  auto min_over_sum = [&](const std::vector<const QueryNode*>& nodes) {
    std::uint64_t sum = 0, mn = 0;
    bool first = true;
    for (const QueryNode* x : nodes) {
      std::uint64_t s = idx.list(x->tag).size();
      sum += s;
      if (first || s < mn) mn = s;
      first = false;
    }
    if (sum == 0) return 0.0;
    return static_cast<double>(mn) / static_cast<double>(sum);
  };
  std::vector<const QueryNode*> outs;
  for (const QueryNode* x : q.nodes)
    if (x->is_output) outs.push_back(x);
  QueryDecomposition d = decompose(q);
  SelectivityEstimate est;
  est.sigma = min_over_sum(outs);
  est.sigma_core = min_over_sum(d.core_nodes());
  return est;
}

}  // namespace tpq
