#pragma once

// Fully-pipelined plan construction.
//
// Constraining subqueries compile to semi-join chains around the
// constrained node's index scan (children first, in query syntax order,
// then the parent side). The query core compiles bottom-up: an output
// core child joins in with an ancestor-sorted partial join; a non-output
// core child starts a descendant-sorted chain along its (unique) core
// child line that is finally attached with the secondary-test variant of
// the ancestor-sorted join, dropping the non-output chain head.
//
// Every operator's required input order equals its child's declared
// output order, so no plan ever sorts.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpq/binjoin.hpp"
#include "tpq/decompose.hpp"
#include "tpq/holjoin.hpp"
#include "tpq/query.hpp"

namespace tpq {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlanKind {
  IndexScan,
  SemiJoinAncAD,
  SemiJoinDescAD,
  SemiJoinAncPC,
  SemiJoinDescPC,
  StackTreeAnc,
  StackTreeDesc,
  StackTreeAncSrt,
  HolisticJoin,
  Project,
  Distinct,
};

inline const char* plan_kind_name(PlanKind k) {
  switch (k) {
    case PlanKind::IndexScan: return "IS";
    case PlanKind::SemiJoinAncAD: return "SemiJoinAncAD";
    case PlanKind::SemiJoinDescAD: return "SemiJoinDescAD";
    case PlanKind::SemiJoinAncPC: return "SemiJoinAncPC";
    case PlanKind::SemiJoinDescPC: return "SemiJoinDescPC";
    case PlanKind::StackTreeAnc: return "StackTreeAnc";
    case PlanKind::StackTreeDesc: return "StackTreeDesc";
    case PlanKind::StackTreeAncSrt: return "StackTreeAncSrt";
    case PlanKind::HolisticJoin: return "HolisticJoin";
    case PlanKind::Project: return "Project";
    case PlanKind::Distinct: return "Distinct";
  }
  return "?";
}

struct PlanNode {
  PlanKind kind;
  JoinSpec spec;          // join operators
  std::string tag;        // IndexScan
  bool level_one = false; // IndexScan restricted by a PC edge from the
                          // virtual document root
  HolisticSpec hol;       // HolisticJoin
  std::vector<int> project_cols;  // Project, 1-based
  std::vector<std::unique_ptr<PlanNode>> children;
  std::vector<int> output_qnodes;  // query node id per output column
  std::vector<int> sort_key;       // 1-based output columns
  int arity = 0;
};

using PlanPtr = std::unique_ptr<PlanNode>;

enum class EngineKind { BJ, HJ, CJ };

inline const char* engine_name(EngineKind e) {
  switch (e) {
    case EngineKind::BJ: return "bj";
    case EngineKind::HJ: return "hj";
    case EngineKind::CJ: return "cj";
  }
  return "?";
}

namespace detail {

// Maps a sort key through a projection mask. The key survives as a
// prefix: a dropped key column ends the guarantee.
inline std::vector<int> remap_key(const std::vector<int>& key,
                                  const std::vector<bool>& mask, int offset) {
  std::vector<int> rank(mask.size() + 1, 0);
  int r = 0;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    rank[c + 1] = mask[c] ? ++r : 0;
  }
  std::vector<int> out;
  for (int col : key) {
    if (!mask[col - 1]) break;
    out.push_back(offset + rank[col]);
  }
  return out;
}

inline std::vector<bool> full_mask(int arity) {
  return std::vector<bool>(arity, true);
}

class PlanBuilder {
 public:
  PlanBuilder(const TwigQuery& q, const QueryDecomposition& d)
      : q_(q), d_(d) {}

  PlanPtr cons_plan(const QueryNode* qo) { return cons_rec(qo, nullptr, true); }

  PlanPtr core_plan(const QueryNode* q) {
    PlanPtr plan = cons_plan(q);
    for (const QueryNode* c : d_.core_children[q->id]) {
      Axis alpha = c->edge_to_parent;
      if (c->is_output) {
        PlanPtr r = core_plan(c);
        plan = make_anc(std::move(plan), std::move(r), alpha);
      } else {
        PlanPtr r = cons_plan(c);
        int i = 1;
        const QueryNode* dd = c;
        while (!dd->is_output) {
          const auto& kids = d_.core_children[dd->id];
          if (kids.size() != 1)
            throw PlanError(
                "non-output core node '" + dd->tag +
                "' does not have exactly one core child; the output "
                "marking is not closed under lowest common ancestors");
          dd = kids[0];
          PlanPtr s = dd->is_output ? core_plan(dd) : cons_plan(dd);
          Axis beta = dd->edge_to_parent;
          r = make_desc(std::move(r), std::move(s), i, beta);
          i = 2;
        }
        plan = make_anc_srt(std::move(plan), std::move(r), alpha);
      }
    }
    return plan;
  }

  PlanPtr scan(const QueryNode* x) const {
    auto p = std::make_unique<PlanNode>();
    p->kind = PlanKind::IndexScan;
    p->tag = x->tag;
    p->level_one = x == q_.root.get() && q_.root_axis == Axis::PC;
    p->arity = 1;
    p->output_qnodes = {x->id};
    p->sort_key = {1};
    return p;
  }

 private:
  PlanPtr cons_rec(const QueryNode* x, const QueryNode* from, bool top) {
    PlanPtr plan = scan(x);
    for (auto& c : x->children) {
      if (c.get() == from) continue;
      if (top && d_.is_core[c->id]) continue;  // core edge, not a filter
      PlanPtr pc = cons_rec(c.get(), x, false);
      plan = make_semi(c->edge_to_parent, /*filter_anc=*/true,
                       std::move(plan), std::move(pc));
    }
    const QueryNode* p = x->parent;
    if (p && p != from && !(top && d_.is_core[p->id])) {
      PlanPtr pp = cons_rec(p, x, false);
      plan = make_semi(x->edge_to_parent, /*filter_anc=*/false,
                       std::move(pp), std::move(plan));
    }
    return plan;
  }

  // filter_anc: keep T_a (left child); otherwise keep T_d (right child).
  PlanPtr make_semi(Axis ax, bool filter_anc, PlanPtr a, PlanPtr d) {
    require_key(*a, 1, "semi-join T_a");
    require_key(*d, 1, "semi-join T_d");
    auto p = std::make_unique<PlanNode>();
    p->kind = filter_anc
                  ? (ax == Axis::AD ? PlanKind::SemiJoinAncAD
                                    : PlanKind::SemiJoinAncPC)
                  : (ax == Axis::AD ? PlanKind::SemiJoinDescAD
                                    : PlanKind::SemiJoinDescPC);
    p->arity = 1;
    p->output_qnodes = filter_anc ? a->output_qnodes : d->output_qnodes;
    p->sort_key = {1};
    p->children.push_back(std::move(a));
    p->children.push_back(std::move(d));
    return p;
  }

  PlanPtr make_anc(PlanPtr a, PlanPtr d, Axis alpha) {
    require_key(*a, 1, "StackTreeAnc T_a");
    require_key(*d, 1, "StackTreeAnc T_d");
    auto p = std::make_unique<PlanNode>();
    p->kind = PlanKind::StackTreeAnc;
    p->spec.mask_a = full_mask(a->arity);
    p->spec.mask_d = full_mask(d->arity);
    p->spec.i = 1;
    p->spec.j = 1;
    p->spec.alpha = alpha;
    finish_anc(*p, *a, *d);
    p->children.push_back(std::move(a));
    p->children.push_back(std::move(d));
    return p;
  }

  PlanPtr make_anc_srt(PlanPtr a, PlanPtr d, Axis alpha) {
    require_key(*a, 1, "StackTreeAncSrt T_a");
    require_key(*d, 2, "StackTreeAncSrt T_d");
    auto p = std::make_unique<PlanNode>();
    p->kind = PlanKind::StackTreeAncSrt;
    p->spec.mask_a = full_mask(a->arity);
    p->spec.mask_d = full_mask(d->arity);
    p->spec.mask_d[0] = false;  // drop the non-output chain head
    p->spec.i = 1;
    p->spec.j = 2;
    p->spec.k = 1;
    p->spec.alpha = alpha;
    finish_anc(*p, *a, *d);
    p->children.push_back(std::move(a));
    p->children.push_back(std::move(d));
    return p;
  }

  void finish_anc(PlanNode& p, const PlanNode& a, const PlanNode& d) {
    p.arity = mask_popcount(p.spec.mask_a) + mask_popcount(p.spec.mask_d);
    for (std::size_t c = 0; c < p.spec.mask_a.size(); ++c)
      if (p.spec.mask_a[c]) p.output_qnodes.push_back(a.output_qnodes[c]);
    for (std::size_t c = 0; c < p.spec.mask_d.size(); ++c)
      if (p.spec.mask_d[c]) p.output_qnodes.push_back(d.output_qnodes[c]);
    p.sort_key = remap_key(a.sort_key, p.spec.mask_a, 0);
    auto tail = remap_key(d.sort_key, p.spec.mask_d,
                          mask_popcount(p.spec.mask_a));
    p.sort_key.insert(p.sort_key.end(), tail.begin(), tail.end());
  }

  PlanPtr make_desc(PlanPtr a, PlanPtr d, int i, Axis beta) {
    require_key(*a, i, "StackTreeDesc T_a");
    require_key(*d, 1, "StackTreeDesc T_d");
    auto p = std::make_unique<PlanNode>();
    p->kind = PlanKind::StackTreeDesc;
    p->spec.mask_a = std::vector<bool>(a->arity, false);
    p->spec.mask_a[0] = true;  // keep only the chain head
    p->spec.mask_d = full_mask(d->arity);
    p->spec.i = i;
    p->spec.j = 1;
    p->spec.alpha = beta;
    p->arity = 1 + d->arity;
    p->output_qnodes.push_back(a->output_qnodes[0]);
    for (int q : d->output_qnodes) p->output_qnodes.push_back(q);
    // Ordered by the descendant tuple order, ancestor arrival order next.
    p->sort_key = remap_key(d->sort_key, p->spec.mask_d, 1);
    auto tail = remap_key(a->sort_key, p->spec.mask_a, 0);
    p->sort_key.insert(p->sort_key.end(), tail.begin(), tail.end());
    p->children.push_back(std::move(a));
    p->children.push_back(std::move(d));
    return p;
  }

  void require_key(const PlanNode& p, int col, const char* what) const {
    if (p.sort_key.empty() || p.sort_key[0] != col)
      throw PlanError(std::string(what) +
                      ": input is not sorted by the join column");
  }

  const TwigQuery& q_;
  const QueryDecomposition& d_;
};

inline PlanPtr wrap_project_distinct(PlanPtr p) {
  auto proj = std::make_unique<PlanNode>();
  proj->kind = PlanKind::Project;
  for (int c = 1; c <= p->arity; ++c) proj->project_cols.push_back(c);
  proj->arity = p->arity;
  proj->output_qnodes = p->output_qnodes;
  proj->sort_key = p->sort_key;
  proj->children.push_back(std::move(p));

  auto dist = std::make_unique<PlanNode>();
  dist->kind = PlanKind::Distinct;
  dist->arity = proj->arity;
  dist->output_qnodes = proj->output_qnodes;
  dist->sort_key = proj->sort_key;
  dist->children.push_back(std::move(proj));
  return dist;
}

// Holistic topology over a node subset (whole query or its core).
// `member` decides membership; child links skip non-members only when
// restricted to the core, where membership is subtree-closed downward.
inline HolisticSpec make_hol_spec(const TwigQuery& q,
                                  const std::vector<const QueryNode*>& nodes) {
  HolisticSpec spec;
  std::vector<int> pos(q.n, -1);
  for (const QueryNode* x : nodes) {
    HolQueryNode h;
    h.qid = x->id;
    h.tag = x->tag;
    h.output = x->is_output;
    h.axis = x->edge_to_parent;
    h.parent = -1;
    for (const QueryNode* p = x->parent; p; p = p->parent) {
      if (pos[p->id] >= 0) {
        h.parent = pos[p->id];
        break;
      }
    }
    pos[x->id] = static_cast<int>(spec.nodes.size());
    spec.nodes.push_back(std::move(h));
  }
  for (std::size_t i = 0; i < spec.nodes.size(); ++i)
    if (spec.nodes[i].output) spec.output_cols.push_back(static_cast<int>(i));
  return spec;
}

}  // namespace detail

inline PlanPtr build_plan_cons(const TwigQuery& q, const QueryDecomposition& d,
                               const QueryNode* core_node) {
  return detail::PlanBuilder(q, d).cons_plan(core_node);
}

inline PlanPtr build_plan_core(const TwigQuery& q,
                               const QueryDecomposition& d) {
  if (!d.single_core_child)
    throw PlanError(
        "output marking is not closed under lowest common ancestors; no "
        "fully-pipelined binary plan exists");
  return detail::PlanBuilder(q, d).core_plan(d.core_root);
}

inline PlanPtr build_plan(const TwigQuery& q, EngineKind engine) {
  QueryDecomposition d = decompose(q);
  detail::PlanBuilder b(q, d);
  switch (engine) {
    case EngineKind::BJ: {
      return detail::wrap_project_distinct(build_plan_core(q, d));
    }
    case EngineKind::HJ: {
      auto p = std::make_unique<PlanNode>();
      p->kind = PlanKind::HolisticJoin;
      std::vector<const QueryNode*> nodes(q.nodes.begin(), q.nodes.end());
      p->hol = detail::make_hol_spec(q, nodes);
      for (const QueryNode* x : q.nodes) p->children.push_back(b.scan(x));
      p->arity = static_cast<int>(p->hol.output_cols.size());
      for (int c : p->hol.output_cols)
        p->output_qnodes.push_back(p->hol.nodes[c].qid);
      for (int c = 1; c <= p->arity; ++c) p->sort_key.push_back(c);
      return p;
    }
    case EngineKind::CJ: {
      if (q.n_o == q.n) return build_plan(q, EngineKind::HJ);
      if (q.n_o == 1) return build_plan(q, EngineKind::BJ);
      auto p = std::make_unique<PlanNode>();
      p->kind = PlanKind::HolisticJoin;
      std::vector<const QueryNode*> core = d.core_nodes();
      p->hol = detail::make_hol_spec(q, core);
      for (const QueryNode* x : core) p->children.push_back(b.cons_plan(x));
      p->arity = static_cast<int>(p->hol.output_cols.size());
      for (int c : p->hol.output_cols)
        p->output_qnodes.push_back(p->hol.nodes[c].qid);
      for (int c = 1; c <= p->arity; ++c) p->sort_key.push_back(c);
      return detail::wrap_project_distinct(std::move(p));
    }
  }
  throw PlanError("unknown engine");
}

namespace detail {

inline std::string mask_string(const std::vector<bool>& m) {
  std::string s;
  for (bool b : m) s += b ? '1' : '0';
  return s;
}

inline std::string key_string(const std::vector<int>& key) {
  std::string s = "(";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(key[i]);
  }
  return s + ")";
}

inline void explain_rec(const PlanNode& p, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  switch (p.kind) {
    case PlanKind::IndexScan:
      out += "IS(" + p.tag + (p.level_one ? ",/" : "") + ")";
      break;
    case PlanKind::StackTreeAnc:
    case PlanKind::StackTreeDesc:
    case PlanKind::StackTreeAncSrt: {
      out += plan_kind_name(p.kind);
      out += "[Ma=" + mask_string(p.spec.mask_a) +
             ",Md=" + mask_string(p.spec.mask_d) +
             ",i=" + std::to_string(p.spec.i) +
             ",j=" + std::to_string(p.spec.j) +
             ",alpha=" + axis_name(p.spec.alpha);
      if (p.kind == PlanKind::StackTreeAncSrt)
        out += ",k=" + std::to_string(p.spec.k);
      out += "]";
      break;
    }
    case PlanKind::HolisticJoin: {
      out += "HolisticJoin[nodes=";
      for (std::size_t i = 0; i < p.hol.nodes.size(); ++i) {
        if (i) out += ' ';
        if (p.hol.nodes[i].parent >= 0)
          out += p.hol.nodes[i].axis == Axis::AD ? "//" : "/";
        out += p.hol.nodes[i].tag;
      }
      out += ",out=" + key_string(p.hol.output_cols) + "]";
      break;
    }
    case PlanKind::Project: {
      out += "Project[";
      for (std::size_t i = 0; i < p.project_cols.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(p.project_cols[i]);
      }
      out += "]";
      break;
    }
    default:
      out += plan_kind_name(p.kind);
      break;
  }
  out += " sort=" + key_string(p.sort_key);
  out += '\n';
  for (const auto& c : p.children) explain_rec(*c, depth + 1, out);
}

}  // namespace detail

// Deterministic, indentation-based plan rendering.
inline std::string explain(const PlanNode& plan) {
  std::string out;
  detail::explain_rec(plan, 0, out);
  return out;
}

// FP property: every stateful operator's required input order is its
// child's declared output order. Scans and streaming filters are exempt.
inline bool is_fully_pipelined(const PlanNode& p) {
  for (const auto& c : p.children)
    if (!is_fully_pipelined(*c)) return false;
  auto starts_with = [](const std::vector<int>& key, int col) {
    return !key.empty() && key[0] == col;
  };
  switch (p.kind) {
    case PlanKind::SemiJoinAncAD:
    case PlanKind::SemiJoinAncPC:
    case PlanKind::SemiJoinDescAD:
    case PlanKind::SemiJoinDescPC:
      return starts_with(p.children[0]->sort_key, 1) &&
             starts_with(p.children[1]->sort_key, 1);
    case PlanKind::StackTreeAnc:
    case PlanKind::StackTreeAncSrt:
      return starts_with(p.children[0]->sort_key, p.spec.i) &&
             starts_with(p.children[1]->sort_key, p.spec.j);
    case PlanKind::StackTreeDesc:
      return starts_with(p.children[0]->sort_key, p.spec.i) &&
             starts_with(p.children[1]->sort_key, p.spec.j);
    default:
      return true;
  }
}

// Operators owning stacks or lists; used by the linear-space bound.
inline int stateful_operator_count(const PlanNode& p) {
  int c = 0;
  switch (p.kind) {
    case PlanKind::SemiJoinAncPC:
    case PlanKind::SemiJoinDescPC:
    case PlanKind::StackTreeAnc:
    case PlanKind::StackTreeDesc:
    case PlanKind::StackTreeAncSrt:
    case PlanKind::HolisticJoin:
      c = 1;
      break;
    default:
      break;
  }
  for (const auto& ch : p.children) c += stateful_operator_count(*ch);
  return c;
}

}  // namespace tpq
