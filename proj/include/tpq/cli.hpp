#pragma once

// Command implementations behind the tpq binary. Kept out of the binary
// so tests can drive the exact command surface in-process.

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tpq/bench.hpp"
#include "tpq/cost.hpp"
#include "tpq/decompose.hpp"
#include "tpq/exec.hpp"
#include "tpq/gendoc.hpp"
#include "tpq/index.hpp"
#include "tpq/optimality.hpp"
#include "tpq/oracle.hpp"
#include "tpq/plan.hpp"
#include "tpq/query.hpp"

namespace tpq::cli {

struct QueryOptions {
  std::string engine = "bj";  // bj | hj | cj | cbj | oracle
  bool stats = false;
  bool explain_only = false;
  std::string provider = "exact";  // cbj statistics provider
  double threshold_sigma = 0.001;
  double threshold_sigma_core = 0.1;
};

struct BenchOptions {
  std::vector<std::string> engines = {"bj", "hj", "cj"};
  int repetitions = 1;
  int randomize_outputs = 0;  // 0 = off
  std::uint64_t seed = 1;
};

inline int cmd_index(const std::string& xml_path, const std::string& out_path,
                     std::ostream& out, std::ostream& err) {
  try {
    InvertedIndex idx = parse_and_label(read_file(xml_path));
    save_index(idx, out_path);
    out << "nodes: " << idx.node_count << "\n";
    out << "depth: " << idx.depth << "\n";
    out << "tags: " << idx.lists.size() << "\n";
    out << "recursive tags:";
    for (const auto& t : idx.recursive_tags) out << " " << t;
    out << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "tpq index: " << e.what() << "\n";
    return 1;
  }
}

namespace detail {

inline EngineKind engine_from_name(const std::string& name) {
  if (name == "bj") return EngineKind::BJ;
  if (name == "hj") return EngineKind::HJ;
  if (name == "cj") return EngineKind::CJ;
  throw std::invalid_argument("unknown engine: " + name);
}

struct RunOutcome {
  std::vector<Tuple> rows;
  ExecStats stats;
  std::string engine;  // resolved engine name
};

inline RunOutcome run_engine(const TwigQuery& q, const InvertedIndex& idx,
                             const std::string& engine,
                             const QueryOptions& opt, std::ostream& err) {
  RunOutcome r;
  if (engine == "oracle") {
    auto t0 = std::chrono::steady_clock::now();
    r.rows = brute_force(q, idx);
    auto t1 = std::chrono::steady_clock::now();
    r.stats.wall_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
            .count());
    r.stats.result_rows = r.rows.size();
    r.engine = "oracle";
  } else {
    std::string resolved = engine;
    if (engine == "cbj") {
      SelectivityEstimate est = opt.provider == "heuristic"
                                    ? estimate_heuristic(q, idx)
                                    : estimate_exact(q, idx);
      CostInputs c;
      c.sigma = est.sigma;
      c.sigma_core = est.sigma_core;
      c.threshold_sigma = opt.threshold_sigma;
      c.threshold_sigma_core = opt.threshold_sigma_core;
      c.rho = compute_output_ratio(q);
      EngineKind chosen = select_engine_cbj(c);
      resolved = engine_name(chosen);
      err << "cbj: sigma=" << format_double(c.sigma)
          << " sigma_core=" << format_double(c.sigma_core) << " -> "
          << resolved << "\n";
    }
    PlanPtr plan = build_plan(q, engine_from_name(resolved));
    ExecResult res = execute(*plan, idx);
    r.rows = std::move(res.rows);
    r.stats = res.stats;
    r.engine = resolved;
  }
  r.stats.sigma = compute_selectivity(q, r.rows, idx);
  r.stats.rho = compute_output_ratio(q);
  return r;
}

}  // namespace detail

inline int cmd_query(const std::string& idx_path, const std::string& pattern,
                     const QueryOptions& opt, std::ostream& out,
                     std::ostream& err) {
  try {
    InvertedIndex idx = load_index(idx_path);
    TwigQuery q = parse_tpq(pattern);
    if (opt.explain_only) {
      if (opt.engine == "oracle" || opt.engine == "cbj")
        throw std::invalid_argument("--explain requires engine bj, hj or cj");
      PlanPtr plan = build_plan(q, detail::engine_from_name(opt.engine));
      out << explain(*plan);
      return 0;
    }
    detail::RunOutcome r = detail::run_engine(q, idx, opt.engine, opt, err);
    for (const Tuple& t : r.rows) out << format_tuple(t) << "\n";
    if (opt.stats) out << stats_csv_row(pattern, r.engine, r.stats) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "tpq query: " << e.what() << "\n";
    return 1;
  }
}

inline int cmd_bench(const std::string& idx_path,
                     const std::string& queries_path,
                     const std::string& out_csv, const BenchOptions& opt,
                     std::ostream& out, std::ostream& err) {
  try {
    if (opt.repetitions < 1)
      throw std::invalid_argument("repetitions must be >= 1");
    InvertedIndex idx = load_index(idx_path);
    std::vector<BenchCase> cases = parse_queries_file(read_file(queries_path));
    std::string csv = stats_csv_header() + "\n";
    QueryOptions qopt;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      const BenchCase& bc = cases[ci];
      TwigQuery base = opt.randomize_outputs > 0
                           ? parse_twig_pattern(bc.pattern)
                           : parse_tpq(bc.pattern);
      std::vector<std::pair<std::string, TwigQuery>> variants;
      if (opt.randomize_outputs > 0) {
        std::mt19937_64 rng(opt.seed + ci);
        auto vs = randomize_output_variants(base, opt.randomize_outputs, rng);
        for (std::size_t vi = 0; vi < vs.size(); ++vi)
          variants.emplace_back(bc.query_id + "v" + std::to_string(vi + 1),
                                std::move(vs[vi]));
      } else {
        variants.emplace_back(bc.query_id, std::move(base));
      }
      for (auto& [id, q] : variants) {
        for (const std::string& engine : opt.engines) {
          for (int rep = 0; rep < opt.repetitions; ++rep) {
            detail::RunOutcome r = detail::run_engine(q, idx, engine, qopt, err);
            csv += stats_csv_row(id, r.engine, r.stats) + "\n";
          }
        }
      }
    }
    write_file(out_csv, csv);
    out << "wrote " << out_csv << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "tpq bench: " << e.what() << "\n";
    return 1;
  }
}

inline int cmd_gendoc(const std::string& shape, int n,
                      const std::string& out_path, std::ostream& out,
                      std::ostream& err) {
  try {
    write_file(out_path, gen_doc(doc_shape_from_name(shape), n));
    out << "wrote " << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "tpq gendoc: " << e.what() << "\n";
    return 1;
  }
}

inline int cmd_analyze(const std::string& idx_path, const std::string& pattern,
                       std::ostream& out, std::ostream& err) {
  try {
    InvertedIndex idx = load_index(idx_path);
    TwigQuery q = parse_tpq(pattern);
    QueryDecomposition d = decompose(q);
    out << "query: " << render_tpq(q) << "\n";
    out << "nodes: " << q.n << ", outputs: " << q.n_o
        << ", rho: " << format_double(compute_output_ratio(q)) << "\n";
    out << "core:";
    for (const QueryNode* c : d.core_nodes()) out << " " << c->tag;
    out << " (root " << d.core_root->tag << ")\n";
    for (const QueryNode* c : d.core_nodes())
      out << "cons(" << c->tag << "): " << render_cons(d, c) << "\n";
    if (!d.single_core_child)
      out << "warning: outputs not closed under LCA; bj/cj planning "
             "unavailable\n";
    OptimalityReport rep = predict_optimality(q, d, idx);
    out << "optimality: " << (rep.optimal ? "optimal" : "not-guaranteed")
        << "\n";
    for (const std::string& v : rep.violated_conditions)
      out << "  - " << v << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "tpq analyze: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tpq::cli
