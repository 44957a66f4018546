#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cfpq/bench.hpp"
#include "support/worked.hpp"

using namespace cfpq;
using namespace cfpq::bench;

namespace {

Graph numbered(std::size_t n) {
  Graph::Builder b;
  for (std::size_t i = 0; i < n; ++i) b.edge(std::to_string(i), "a", std::to_string((i + 1) % n));
  return std::move(b).build();
}

RunRecord record(std::string scenario, Mode m, std::size_t size, double millis) {
  RunRecord r;
  r.scenario = std::move(scenario);
  r.mode = m;
  r.chunk_size = size;
  r.millis = millis;
  return r;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("selected vertex counts") {
  CHECK(selected_vertex_count(6) == 6);
  CHECK(selected_vertex_count(9'999) == 9'999);
  CHECK(selected_vertex_count(10'000) == 1'000);
  CHECK(selected_vertex_count(100'000) == 10'000);
  CHECK(selected_vertex_count(100'001) == 1'001);
  CHECK(selected_vertex_count(250'000) == 2'500);
}

TEST_CASE("chunking is a seeded partition") {
  Graph g = numbered(6);
  std::size_t sizes[] = {2};
  auto a = chunk_starts(g, sizes, 7);
  auto b = chunk_starts(g, sizes, 7);
  REQUIRE(a.size() == 1);
  CHECK(a[0].chunks.size() == 3);
  CHECK(a[0].chunks == b[0].chunks);
  std::set<VertexId> seen;
  for (const auto& c : a[0].chunks) {
    CHECK(c.size() == 2);
    seen.insert(c.begin(), c.end());
  }
  CHECK(seen.size() == 6);

  std::size_t uneven[] = {4, 1, 100};
  auto c = chunk_starts(g, uneven, 7);
  CHECK(c[0].chunks.size() == 2);
  CHECK(c[0].chunks[1].size() == 2);
  CHECK(c[1].chunks.size() == 6);
  CHECK(c[2].chunks.size() == 1);
  // every size cuts the same permutation
  std::vector<VertexId> flat;
  for (const auto& ch : c[0].chunks) flat.insert(flat.end(), ch.begin(), ch.end());
  std::vector<VertexId> singles;
  for (const auto& ch : c[1].chunks) singles.push_back(ch.front());
  CHECK(flat == singles);

  std::size_t none[] = {0};
  CHECK_THROWS_AS(chunk_starts(g, none, 7), BenchError);
}

TEST_CASE("ten percent of a mid-size graph") {
  Graph g = numbered(20'000);
  std::size_t sizes[] = {1'000};
  auto c = chunk_starts(g, sizes, 42);
  CHECK(c[0].chunks.size() == 2);
  std::set<VertexId> distinct;
  for (const auto& ch : c[0].chunks) distinct.insert(ch.begin(), ch.end());
  CHECK(distinct.size() == 2'000);
}

TEST_CASE("builtin templates") {
  auto qs = builtin_queries();
  for (const char* name : {"G1", "G2", "Geo", "reg1", "reg2", "reg3", "reg4"}) CHECK(qs.contains(name));
  CHECK(qs.at("G1").fixed.at("a") == "subClassOf");
  CHECK(qs.at("G1").fixed.at("b") == "type");
  CHECK(qs.at("Geo").fixed.at("a") == "broaderTransitive");
  CHECK(qs.at("reg4").kind == QueryKind::Rpq);

  Graph g = Graph::from_text("x p y\ny p z\nz q x\nx subClassOf y\n", EdgeListOptions{true, "_r"});
  CHECK(labels_by_frequency(g) == std::vector<std::string>{"p", "q", "subClassOf"});
  BoundQuery reg = instantiate(qs.at("reg2"), g);
  CHECK(reg.binding.at("a") == "p");
  CHECK(reg.binding.at("b") == "q");
  CHECK(to_text(reg.grammar) == "S -> p* q*\n");
  BoundQuery g2 = instantiate(qs.at("G2"), g);
  CHECK(to_text(g2.grammar) == "S -> subClassOf_r S subClassOf | subClassOf\n");
  CHECK(g2.missing_labels.empty());
  BoundQuery g1 = instantiate(qs.at("G1"), g);
  CHECK(g1.missing_labels == std::vector<std::string>{"type_r", "type"});
}

TEST_CASE("scenario files") {
  Scenario s = parse_scenario(
      "# demo\nname = demo\ngraph = g.txt\nquery = reg1\nchunk_sizes = 1, 5\nseed = 9\n"
      "modes = ebnf, bnf\nrepeats = 3\nadd_inverse = true\n",
      "/data");
  CHECK(s.name == "demo");
  CHECK(s.graph_path == "/data/g.txt");
  CHECK(s.chunk_sizes == std::vector<std::size_t>{1, 5});
  CHECK(s.seed == 9);
  CHECK(s.modes == std::vector<Mode>{Mode::Ebnf, Mode::Bnf});
  CHECK(s.repeats == 3);
  CHECK(s.add_inverse);

  Scenario e = parse_scenario("graph = g\ngrammar = q.txt\nchunks = v0; v1, v2\n", "/d");
  CHECK(e.explicit_chunks == std::vector<std::vector<std::string>>{{"v0"}, {"v1", "v2"}});

  CHECK_THROWS_AS(parse_scenario("graph = g\n"), BenchError);
  CHECK_THROWS_AS(parse_scenario("graph = g\nquery = G1\ngrammar = x\n"), BenchError);
  CHECK_THROWS_AS(parse_scenario("graph = g\nquery = G1\ncolour = red\n"), BenchError);
  CHECK_THROWS_AS(parse_scenario("graph = g\nquery = G1\nseed = many\n"), BenchError);
  CHECK_THROWS_AS(parse_mode("lr"), BenchError);
  CHECK(mode_name(parse_mode("bnf")) == "bnf-rsm");
}

TEST_CASE("workload pair counts per chunk") {
  Graph g = testing::two_vertex_graph();
  Workload w;
  w.name = "two";
  w.graph = &g;
  w.grammar = parse_grammar_text("S -> a b | a S b");
  w.modes = {Mode::Ebnf, Mode::Bnf};
  w.repeats = 3;
  w.chunkings = {Chunking{1, {{VertexId{0}}, {VertexId{1}}}}};
  for (unsigned jobs : {1u, 4u}) {
    auto recs = run_workload(w, jobs);
    REQUIRE(recs.size() == 12);
    for (const RunRecord& r : recs) CHECK(r.pairs == (r.chunk == 0 ? 2u : 0u));
    CHECK(recs[0].mode == Mode::Ebnf);
    CHECK(recs[11].mode == Mode::Bnf);
    CHECK(recs[2].repeat == 2);
    auto sum = summarize(recs);
    CHECK(sum.size() == 2);
    CHECK(sum[0].runs == 6);
    CHECK(sum[0].mean_pairs == doctest::Approx(1.0));
  }
}

TEST_CASE("both pipelines answer the same") {
  Graph g = numbered(5);
  for (const char* text : {"S -> a b | a S b", "S -> (a S b)*", "S -> a+ | S S"}) {
    EbnfGrammar eg = parse_grammar_text(text);
    std::vector<VertexId> all;
    for (std::uint32_t i = 0; i < 5; ++i) all.push_back(VertexId{i});
    auto e = run_query(compile(eg, Mode::Ebnf), g, all);
    auto b = run_query(compile(eg, Mode::Bnf), g, all);
    CHECK(e.accepted.size() == b.accepted.size());
  }
}

TEST_CASE("scenario run from disk") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cfpq_bench_test";
  fs::create_directories(dir);
  std::ofstream(dir / "g.txt") << "v0 a v0\nv0 b v1\nv1 b v0\n";
  std::ofstream(dir / "q.txt") << "S -> a b | a S b\n";
  std::ofstream(dir / "s.scn") << "graph = g.txt\ngrammar = q.txt\nchunk_sizes = 1\nmodes = ebnf, bnf\n";
  Scenario s = load_scenario((dir / "s.scn").string());
  CHECK(s.name == "s");
  auto recs = run_scenario(s);
  CHECK(recs.size() == 4);
  std::size_t pairs = 0;
  for (const auto& r : recs) pairs += r.pairs;
  CHECK(pairs == 4);
  std::ostringstream csv;
  write_csv(csv, recs);
  const std::string text = csv.str();
  CHECK(text.rfind("scenario,mode,chunk_size,repeat,millis,pairs,descriptors,gss_nodes,gss_edges\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  fs::remove_all(dir);
}

TEST_CASE("speedup ratios") {
  std::vector<RunRecord> recs{record("x", Mode::Ebnf, 1, 10), record("x", Mode::Bnf, 1, 10),
                              record("y", Mode::Ebnf, 1, 10), record("y", Mode::Bnf, 1, 20)};
  SpeedupReport rep = speedup_report(recs);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].ratio == doctest::Approx(1.0));
  CHECK(rep.rows[1].ratio == doctest::Approx(2.0));
  CHECK(rep.geometric_mean == doctest::Approx(std::sqrt(2.0)));
  recs.push_back(record("z", Mode::Ebnf, 1, 5));
  CHECK_THROWS_AS(speedup_report(recs), BenchError);
}

}
