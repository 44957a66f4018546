#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "cfpq/oracle/oracle.hpp"
#include "cfpq/results.hpp"
#include "support/instances.hpp"
#include "support/worked.hpp"

using namespace cfpq;

namespace {

constexpr VertexId v(std::uint32_t i) { return VertexId{i}; }

QueryResult worked_result(const Graph& g) {
  VertexId starts[] = {v(0)};
  return run_query(testing::anbn_machine(), g, starts);
}

std::vector<std::string> formatted(const Graph& g, const std::vector<Path>& ps) {
  std::vector<std::string> out;
  for (const Path& p : ps) out.push_back(format_path(g, p));
  return out;
}

std::size_t count_kind(const Sppf& s, SppfNode::Kind k) {
  return static_cast<std::size_t>(
      std::count_if(s.nodes.begin(), s.nodes.end(), [&](const SppfNode& n) { return n.kind == k; }));
}

// same order the enumerator promises: length, word, visited vertex names
bool path_before(const Graph& g, const Path& a, const Path& b) {
  auto key = [&](const Path& p) {
    std::vector<std::string> names{g.vertex_name(p.start)};
    for (const PathStep& s : p.steps) names.push_back(g.vertex_name(s.target));
    return std::tuple(p.length(), word_names(g, p), names);
  };
  return key(a) < key(b);
}

}  // namespace

TEST_SUITE("results") {

TEST_CASE("reachable pairs of the two-vertex example") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  CHECK(reachable_pairs(qr) == std::vector<VertexPair>{{v(0), v(0)}, {v(0), v(1)}});
  std::ostringstream csv;
  auto pairs = reachable_pairs(qr);
  write_pairs_csv(csv, g, pairs);
  CHECK(csv.str() == "v0,v0\nv0,v1\n");
}

TEST_CASE("two-vertex path index holds exactly the expected cells") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  std::vector<std::string> lines;
  for (const Cell& c : qr.index.cells()) {
    std::vector<std::string> es;
    for (const IndexEntry& e : qr.index.entries(c)) es.push_back(entry_text(e, g, qr.rsm.machine()));
    std::sort(es.begin(), es.end());
    std::string line = "(" + point_text(c.from, g, qr.rsm.machine()) + ")->(" +
                       point_text(c.to, g, qr.rsm.machine()) + ")";
    for (const auto& e : es) line += " " + e;
    lines.push_back(line);
  }
  std::sort(lines.begin(), lines.end());
  CHECK(lines == std::vector<std::string>{
                     "(q0,v0)->(q1,v0) a",
                     "(q0,v0)->(q2,v0) I_{q1,v0}",
                     "(q0,v0)->(q2,v1) I_{q1,v0}",
                     "(q0,v0)->(q3,v0) I_{q2,v1}",
                     "(q0,v0)->(q3,v1) I_{q1,v0} I_{q2,v0}",
                     "(q1,v0)->(q2,v0) S",
                     "(q1,v0)->(q2,v1) S",
                     "(q1,v0)->(q3,v1) b",
                     "(q2,v0)->(q3,v1) b",
                     "(q2,v1)->(q3,v0) b",
                     "(q4,v0)->(q5,v0) S",
                     "(q4,v0)->(q5,v1) S",
                 });
}

TEST_CASE("two-vertex SPPF has 23 nodes and 25 edges") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  Sppf s = build_sppf(qr, root_range(qr, v(0), v(0)));
  CHECK(s.nodes.size() == 23);
  CHECK(s.edge_count() == 25);
  CHECK(count_kind(s, SppfNode::Kind::Range) == 11);
  CHECK(count_kind(s, SppfNode::Kind::Epsilon) == 0);
  CHECK(s.node(s.root).kind == SppfNode::Kind::Range);
  // the cycle through S at (q1,v0)
  bool has_cycle_target = false;
  for (const SppfNode& n : s.nodes) {
    for (SppfNodeId c : n.children) has_cycle_target |= c == s.root;
  }
  CHECK_FALSE(has_cycle_target);
}

TEST_CASE("SPPF of the empty word") {
  Graph g = testing::two_vertex_graph();
  VertexId starts[] = {v(0)};
  QueryResult qr = run_query(extend_rsm(build_rsm(parse_grammar_text("S -> eps"))), g, starts);
  Sppf s = build_sppf(qr, root_range(qr, v(0), v(0)));
  CHECK(s.nodes.size() == 3);
  CHECK(s.edge_count() == 2);
  CHECK(count_kind(s, SppfNode::Kind::Epsilon) == 1);
  std::string dot = sppf_to_dot(s);
  CHECK(std::count(dot.begin(), dot.end(), '[') == 3);
}

TEST_CASE("missing derivations raise NoDerivation") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  CHECK_THROWS_AS(build_sppf(qr, root_range(qr, v(1), v(1))), NoDerivation);
  CHECK(enumerate_paths(qr, v(1), v(0)).empty());
}

TEST_CASE("DOT output is reproducible") {
  Graph g = testing::two_vertex_graph();
  std::string first = sppf_to_dot(build_sppf(worked_result(g), root_range(worked_result(g), v(0), v(1))));
  QueryResult qr = worked_result(g);
  std::string second = sppf_to_dot(build_sppf(qr, root_range(qr, v(0), v(1))));
  CHECK(first == second);
  CHECK(first.rfind("digraph sppf {", 0) == 0);
  CHECK(first.find("peripheries=2") != std::string::npos);
}

TEST_CASE("range nodes are shared between roots") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  SppfForest forest(qr);
  SppfNodeId a = forest.expand(root_range(qr, v(0), v(0)));
  const std::size_t after_first = forest.node_count();
  SppfNodeId b = forest.expand(root_range(qr, v(0), v(1)));
  CHECK(a != b);
  CHECK(forest.expand(root_range(qr, v(0), v(0))) == a);
  auto ra = forest.range_nodes_from(a);
  auto rb = forest.range_nodes_from(b);
  std::set<SppfNodeId> sa(ra.begin(), ra.end());
  CHECK(std::any_of(rb.begin(), rb.end(), [&](SppfNodeId id) { return sa.contains(id); }));
  const std::size_t separate = build_sppf(qr, root_range(qr, v(0), v(1))).nodes.size();
  CHECK(forest.node_count() - after_first < separate);
}

TEST_CASE("three-cycle with two-letter words") {
  Graph g = Graph::from_text("0 a 1\n1 a 2\n2 a 0\n");
  VertexId all[] = {v(0), v(1), v(2)};
  QueryResult qr = run_query(extend_rsm(build_rsm(parse_grammar_text("S -> a a"))), g, all);
  CHECK(reachable_pairs(qr) == std::vector<VertexPair>{{v(0), v(2)}, {v(1), v(0)}, {v(2), v(1)}});
  auto ps = enumerate_paths(qr, v(2), v(1), {5, 10});
  CHECK(formatted(g, ps) == std::vector<std::string>{"2 -a-> 0 -a-> 1"});
}

TEST_CASE("paths of the two-vertex example") {
  Graph g = testing::two_vertex_graph();
  QueryResult qr = worked_result(g);
  CHECK(formatted(g, enumerate_paths(qr, v(0), v(0), {1, 10})) ==
        std::vector<std::string>{"v0 -a-> v0 -a-> v0 -b-> v1 -b-> v0"});
  auto to_v0 = enumerate_paths(qr, v(0), v(0), {2, 10});
  REQUIRE(to_v0.size() == 2);
  CHECK(to_v0[1].length() == 8);
  CHECK(formatted(g, enumerate_paths(qr, v(0), v(1), {2, 10})) ==
        std::vector<std::string>{"v0 -a-> v0 -b-> v1", "v0 -a-> v0 -a-> v0 -a-> v0 -b-> v1 -b-> v0 -b-> v1"});
  CHECK(enumerate_paths(qr, v(0), v(0), {10, 3}).empty());
  CHECK(enumerate_paths(qr, v(0), v(1), {10, 2}).size() == 1);
}

TEST_CASE("enumerated paths match brute force on random instances") {
  for (const auto& inst : testing::cfpq_instances(40, 7)) {
    CAPTURE(inst.seed);
    CAPTURE(inst.grammar.name);
    EbnfGrammar eg = parse_grammar_text(inst.grammar.text);
    CnfGrammar cnf = to_cnf(ebnf_to_bnf(eg));
    QueryResult qr = run_query(extend_rsm(build_rsm(eg)), inst.graph, inst.starts);
    constexpr std::size_t kLen = 6;
    constexpr std::size_t kMax = 4;
    for (VertexId s : inst.starts) {
      std::map<VertexId, std::vector<Path>> expected;
      oracle::for_each_path_bounded(inst.graph, s, kLen, [&](const Path& p) {
        if (oracle::cyk_membership(inst.graph, p, cnf)) expected[p.end()].push_back(p);
        return true;
      });
      for (std::uint32_t t = 0; t < inst.graph.vertex_count(); ++t) {
        auto& want = expected[v(t)];
        std::sort(want.begin(), want.end(),
                  [&](const Path& a, const Path& b) { return path_before(inst.graph, a, b); });
        if (want.size() > kMax) want.resize(kMax);
        CHECK(enumerate_paths(qr, s, v(t), {kMax, kLen}) == want);
      }
    }
  }
}

}
