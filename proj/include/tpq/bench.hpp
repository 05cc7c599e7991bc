#pragma once

// Benchmark harness pieces: the queries file, random output-marking
// variants, and the stats CSV.
//
// Random output subsets are kept closed under pairwise lowest common
// ancestors so every variant stays plannable by the binary-join engine;
// a pre-order prefix (always closed) is the fallback when rejection
// sampling cannot hit the requested size.

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tpq/query.hpp"
#include "tpq/stats.hpp"

namespace tpq {

struct BenchCase {
  std::string query_id;
  std::string pattern;
};

inline std::vector<BenchCase> parse_queries_file(std::string_view text) {
  std::vector<BenchCase> cases;
  std::size_t start = 0;
  int lineno = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.remove_suffix(1);
    while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
    if (line.empty() || line.front() == '#') {
      if (start > text.size()) break;
      continue;
    }
    cases.push_back({"q" + std::to_string(cases.size() + 1),
                     std::string(line)});
    if (start > text.size()) break;
  }
  return cases;
}

namespace detail {

inline const QueryNode* query_lca(const QueryNode* a, const QueryNode* b) {
  std::set<const QueryNode*> anc;
  for (const QueryNode* x = a; x; x = x->parent) anc.insert(x);
  for (const QueryNode* x = b; x; x = x->parent)
    if (anc.count(x)) return x;
  return nullptr;
}

inline void close_under_lca(const TwigQuery& q, std::set<int>& ids) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> cur(ids.begin(), ids.end());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t j = i + 1; j < cur.size(); ++j) {
        const QueryNode* l = query_lca(q.nodes[cur[i]], q.nodes[cur[j]]);
        if (ids.insert(l->id).second) changed = true;
      }
    }
  }
}

}  // namespace detail

// A random output set of exactly `size` nodes, closed under pairwise
// lowest common ancestors.
inline std::set<int> random_output_set(const TwigQuery& q, int size,
                                       std::mt19937_64& rng) {
  std::vector<int> ids(q.n);
  for (int i = 0; i < q.n; ++i) ids[i] = i;
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::shuffle(ids.begin(), ids.end(), rng);
    std::set<int> chosen;
    for (int id : ids) {
      if (static_cast<int>(chosen.size()) == size) break;
      std::set<int> trial = chosen;
      trial.insert(id);
      detail::close_under_lca(q, trial);
      if (static_cast<int>(trial.size()) <= size) chosen = std::move(trial);
    }
    if (static_cast<int>(chosen.size()) == size) return chosen;
  }
  // Pre-order prefixes are closed under LCA.
  std::set<int> prefix;
  for (int i = 0; i < size; ++i) prefix.insert(i);
  return prefix;
}

inline TwigQuery with_outputs(const TwigQuery& q, const std::set<int>& ids) {
  TwigQuery v = clone_query(q);
  for (QueryNode* x : v.nodes) x->is_output = ids.count(x->id) > 0;
  v.refresh();
  return v;
}

// k variants of the pattern, each with a distinct random output count in
// 1..n. Seeded, hence reproducible.
inline std::vector<TwigQuery> randomize_output_variants(const TwigQuery& q,
                                                        int k,
                                                        std::mt19937_64& rng) {
  if (k < 1 || k > q.n)
    throw std::invalid_argument(
        "randomize-outputs: variant count must be in 1..n");
  std::vector<int> sizes(q.n);
  for (int i = 0; i < q.n; ++i) sizes[i] = i + 1;
  std::shuffle(sizes.begin(), sizes.end(), rng);
  sizes.resize(k);
  std::vector<TwigQuery> out;
  out.reserve(sizes.size());
  for (int s : sizes)
    out.push_back(with_outputs(q, random_output_set(q, s, rng)));
  return out;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string stats_csv_row(const std::string& query_id,
                                 const std::string& engine,
                                 const ExecStats& s) {
  std::string row = query_id + "," + engine;
  row += "," + std::to_string(s.wall_ns);
  row += "," + std::to_string(s.advances);
  row += "," + std::to_string(s.getnext_calls);
  row += "," + std::to_string(s.stack_ops);
  row += "," + std::to_string(s.list_peak);
  row += "," + std::to_string(s.mu);
  row += "," + std::to_string(s.result_rows);
  row += "," + format_double(s.sigma);
  row += "," + format_double(s.rho);
  return row;
}

}  // namespace tpq
