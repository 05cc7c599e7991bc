// tpq: index XML documents and evaluate twig pattern queries over them.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"twig pattern query engine"};
  app.require_subcommand(1);

  // index
  std::string xml_path, idx_out;
  auto* sub_index = app.add_subcommand("index", "build an index from XML");
  sub_index->add_option("xml", xml_path, "input XML file")->required();
  sub_index->add_option("-o,--out", idx_out, "output index file")->required();

  // query
  std::string q_idx, q_pattern;
  tpq::cli::QueryOptions qopt;
  auto* sub_query = app.add_subcommand("query", "evaluate a pattern");
  sub_query->add_option("idx", q_idx, "index file")->required();
  sub_query->add_option("-q,--query", q_pattern, "TPQ pattern")->required();
  sub_query->add_option("--engine", qopt.engine,
                        "bj | hj | cj | cbj | oracle");
  sub_query->add_flag("--stats", qopt.stats, "append the stats CSV row");
  sub_query->add_flag("--explain", qopt.explain_only,
                      "print the plan, do not execute");
  sub_query->add_option("--stats-provider", qopt.provider,
                        "cbj selectivity provider: exact | heuristic");
  sub_query->add_option("--sigma-threshold", qopt.threshold_sigma,
                        "cbj Sigma threshold");
  sub_query->add_option("--sigma-core-threshold", qopt.threshold_sigma_core,
                        "cbj Sigma_core threshold");

  // bench
  std::string b_idx, b_queries, b_out;
  tpq::cli::BenchOptions bopt;
  std::string b_engines = "bj,hj,cj";
  auto* sub_bench = app.add_subcommand("bench", "run a benchmark suite");
  sub_bench->add_option("idx", b_idx, "index file")->required();
  sub_bench->add_option("--queries", b_queries, "queries file, one per line")
      ->required();
  sub_bench->add_option("--out", b_out, "output CSV")->required();
  sub_bench->add_option("--engines", b_engines, "comma-separated engines");
  sub_bench->add_option("--reps", bopt.repetitions, "repetitions per case");
  sub_bench->add_option("--randomize-outputs", bopt.randomize_outputs,
                        "emit K variants with distinct output counts");
  sub_bench->add_option("--seed", bopt.seed, "seed for output randomization");

  // gendoc
  std::string g_shape = "demo", g_out;
  int g_n = 1;
  auto* sub_gendoc = app.add_subcommand("gendoc", "write a synthetic document");
  sub_gendoc->add_option("--shape", g_shape, "demo | suboptimal");
  sub_gendoc->add_option("--n", g_n, "size parameter")->required();
  sub_gendoc->add_option("-o,--out", g_out, "output XML file")->required();

  // analyze
  std::string a_idx, a_pattern;
  auto* sub_analyze =
      app.add_subcommand("analyze", "decomposition and optimality report");
  sub_analyze->add_option("idx", a_idx, "index file")->required();
  sub_analyze->add_option("-q,--query", a_pattern, "TPQ pattern")->required();

  CLI11_PARSE(app, argc, argv);

  if (sub_index->parsed())
    return tpq::cli::cmd_index(xml_path, idx_out, std::cout, std::cerr);
  if (sub_query->parsed())
    return tpq::cli::cmd_query(q_idx, q_pattern, qopt, std::cout, std::cerr);
  if (sub_bench->parsed()) {
    bopt.engines.clear();
    std::size_t start = 0;
    while (start <= b_engines.size()) {
      std::size_t comma = b_engines.find(',', start);
      if (comma == std::string::npos) comma = b_engines.size();
      if (comma > start)
        bopt.engines.push_back(b_engines.substr(start, comma - start));
      start = comma + 1;
    }
    return tpq::cli::cmd_bench(b_idx, b_queries, b_out, bopt, std::cout,
                               std::cerr);
  }
  if (sub_gendoc->parsed())
    return tpq::cli::cmd_gendoc(g_shape, g_n, g_out, std::cout, std::cerr);
  if (sub_analyze->parsed())
    return tpq::cli::cmd_analyze(a_idx, a_pattern, std::cout, std::cerr);
  return 1;
}
