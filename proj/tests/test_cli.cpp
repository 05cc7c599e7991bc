#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "testutil.hpp"
#include "tpq/cli.hpp"

using namespace tpq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tpq_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string strip_wall_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::size_t c1 = line.find(',');
    std::size_t c2 = line.find(',', c1 + 1);
    std::size_t c3 = line.find(',', c2 + 1);
    out += line.substr(0, c2) + line.substr(c3) + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("index command reports document statistics") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), tpqtest::kSampleXml);
  std::ostringstream out, err;
  int rc = cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), out, err);
  REQUIRE(rc == 0);
  CHECK(out.str() ==
        "nodes: 16\ndepth: 5\ntags: 7\nrecursive tags: b c d\n");
  InvertedIndex idx = load_index(tmp.file("doc.idx"));
  CHECK(idx.node_count == 16);
}

TEST_CASE("index command fails cleanly on bad input") {
  TempDir tmp;
  write_file(tmp.file("empty.xml"), "");
  std::ostringstream out, err;
  CHECK(cli::cmd_index(tmp.file("empty.xml"), tmp.file("x.idx"), out, err) !=
        0);
  CHECK(err.str().find("tpq index:") == 0);
  std::ostringstream out2, err2;
  CHECK(cli::cmd_index(tmp.file("missing.xml"), tmp.file("x.idx"), out2,
                       err2) != 0);
}

TEST_CASE("query command prints rows and stats") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), tpqtest::kSampleXml);
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);

  for (const char* engine : {"bj", "hj", "cj", "oracle"}) {
    std::ostringstream out, err;
    cli::QueryOptions opt;
    opt.engine = engine;
    int rc = cli::cmd_query(tmp.file("doc.idx"),
                            "//r/$a[./b//$c]//$d[./e and .//f]", opt, out,
                            err);
    REQUIRE(rc == 0);
    CHECK(out.str() ==
          "[2:19,2]\t[4:7,4]\t[9:18,3]\n[2:19,2]\t[5:6,5]\t[9:18,3]\n");
  }

  std::ostringstream out, err;
  cli::QueryOptions opt;
  opt.engine = "bj";
  opt.stats = true;
  REQUIRE(cli::cmd_query(tmp.file("doc.idx"), "//$a//$c", opt, out, err) == 0);
  std::istringstream lines(out.str());
  std::string line, last;
  int nlines = 0;
  while (std::getline(lines, line)) {
    ++nlines;
    last = line;
  }
  CHECK(nlines == 4);  // 3 rows + stats
  CHECK(last.find("//$a//$c,bj,") == 0);

  std::ostringstream out2, err2;
  cli::QueryOptions bad;
  bad.engine = "weird";
  CHECK(cli::cmd_query(tmp.file("doc.idx"), "//$a", bad, out2, err2) != 0);

  std::ostringstream out3, err3;
  cli::QueryOptions syn;
  CHECK(cli::cmd_query(tmp.file("doc.idx"), "//$a[./b", syn, out3, err3) != 0);
  CHECK(err3.str().find("tpq query:") == 0);
}

TEST_CASE("query command explains without executing") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), "<a><b/></a>");
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);
  std::ostringstream out, err;
  cli::QueryOptions opt;
  opt.engine = "bj";
  opt.explain_only = true;
  REQUIRE(cli::cmd_query(tmp.file("doc.idx"), "//$a//b//c/$d", opt, out,
                         err) == 0);
  CHECK(out.str() ==
        "Distinct sort=(1,2)\n"
        "  Project[1,2] sort=(1,2)\n"
        "    StackTreeAncSrt[Ma=1,Md=01,i=1,j=2,alpha=AD,k=1] sort=(1,2)\n"
        "      IS(a) sort=(1)\n"
        "      StackTreeDesc[Ma=10,Md=1,i=2,j=1,alpha=PC] sort=(2)\n"
        "        StackTreeDesc[Ma=1,Md=1,i=1,j=1,alpha=AD] sort=(2,1)\n"
        "          IS(b) sort=(1)\n"
        "          IS(c) sort=(1)\n"
        "        IS(d) sort=(1)\n");
}

TEST_CASE("cbj resolves through the configured provider") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), gen_doc(DocShape::Demo, 40));
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);
  std::ostringstream out, err;
  cli::QueryOptions opt;
  opt.engine = "cbj";
  opt.stats = true;
  REQUIRE(cli::cmd_query(tmp.file("doc.idx"), "//$a//$b//$c", opt, out, err) ==
          0);
  // demo1 with all outputs is maximally unselective: sigma = 1 -> BJ.
  CHECK(err.str().find("-> bj") != std::string::npos);
  CHECK(out.str().find(",bj,") != std::string::npos);
}

TEST_CASE("gendoc writes generator output") {
  TempDir tmp;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_gendoc("suboptimal", 3, tmp.file("s.xml"), out, err) == 0);
  CHECK(read_file(tmp.file("s.xml")) == "<a><a><b/><b/><b/></a><b/></a>");
  std::ostringstream out2, err2;
  CHECK(cli::cmd_gendoc("demo", 0, tmp.file("d.xml"), out2, err2) != 0);
  CHECK(cli::cmd_gendoc("sphere", 3, tmp.file("d.xml"), out2, err2) != 0);
}

TEST_CASE("analyze prints decomposition and optimality") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), tpqtest::kSampleXml);
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);
  std::ostringstream out, err;
  REQUIRE(cli::cmd_analyze(tmp.file("doc.idx"),
                           "//r/$a[./b//$c]//$d[./e and .//f]", out,
                           err) == 0);
  std::string text = out.str();
  CHECK(text.find("core: a b c d (root a)") != std::string::npos);
  CHECK(text.find("cons(a): //r/$a") != std::string::npos);
  CHECK(text.find("cons(d): $d[./e and .//f]") != std::string::npos);
  CHECK(text.find("optimality: ") != std::string::npos);
}

TEST_CASE("bench writes one CSV row per case, engine and repetition") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), gen_doc(DocShape::Demo, 10));
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);
  write_file(tmp.file("queries.txt"),
             "# demo suite\n//$a//$b//$c\n\n//$a//$b[.//$c]/$d\n");
  cli::BenchOptions opt;
  opt.engines = {"bj", "hj", "cj"};
  opt.repetitions = 2;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_bench(tmp.file("doc.idx"), tmp.file("queries.txt"),
                         tmp.file("out.csv"), opt, out, err) == 0);
  std::string csv = read_file(tmp.file("out.csv"));
  std::istringstream lines(csv);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) ++n;
  CHECK(n == 1 + 2 * 3 * 2);  // header + cases x engines x reps
  CHECK(csv.find(stats_csv_header()) == 0);
}

TEST_CASE("bench output randomization is reproducible") {
  TempDir tmp;
  write_file(tmp.file("doc.xml"), tpqtest::kSampleXml);
  std::ostringstream o1, e1;
  REQUIRE(cli::cmd_index(tmp.file("doc.xml"), tmp.file("doc.idx"), o1, e1) ==
          0);
  write_file(tmp.file("queries.txt"), "//r/a[./b/c]//d[./e and .//f]\n");
  cli::BenchOptions opt;
  opt.engines = {"hj"};
  opt.randomize_outputs = 7;
  opt.seed = 42;
  std::ostringstream out, err;
  REQUIRE(cli::cmd_bench(tmp.file("doc.idx"), tmp.file("queries.txt"),
                         tmp.file("a.csv"), opt, out, err) == 0);
  REQUIRE(cli::cmd_bench(tmp.file("doc.idx"), tmp.file("queries.txt"),
                         tmp.file("b.csv"), opt, out, err) == 0);
  // Identical modulo the wall-clock column.
  CHECK(strip_wall_column(read_file(tmp.file("a.csv"))) ==
        strip_wall_column(read_file(tmp.file("b.csv"))));
  std::istringstream lines(read_file(tmp.file("a.csv")));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 7);
}

TEST_CASE("randomized output variants have distinct counts") {
  TwigQuery q = parse_twig_pattern("//r/a[./b/c]//d[./e and .//f]");
  std::mt19937_64 rng(9);
  auto vs = randomize_output_variants(q, 7, rng);
  REQUIRE(vs.size() == 7);
  std::set<int> counts;
  for (auto& v : vs) {
    counts.insert(v.n_o);
    CHECK(decompose(v).single_core_child);  // LCA-closed by construction
  }
  CHECK(counts.size() == 7);
  CHECK_THROWS_AS(randomize_output_variants(q, 8, rng),
                  std::invalid_argument);
}
