#include <doctest.h>

#include <algorithm>
#include <set>

#include "cfpq/gll.hpp"
#include "cfpq/results.hpp"
#include "support/instances.hpp"
#include "support/worked.hpp"

using namespace cfpq;

namespace {

using testing::anbn_machine;
Graph two_vertex() { return testing::two_vertex_graph(); }

constexpr StateId q(std::uint32_t i) { return StateId{i}; }
constexpr VertexId v(std::uint32_t i) { return VertexId{i}; }
Point pt(std::uint32_t s, std::uint32_t x) { return {q(s), v(x)}; }
Range rng(std::uint32_t s0, std::uint32_t v0, std::uint32_t s1, std::uint32_t v1) {
  return Range::of(pt(s0, v0), pt(s1, v1));
}
bool contains(const std::vector<Descriptor>& ds, const Descriptor& d) {
  return std::find(ds.begin(), ds.end(), d) != ds.end();
}

std::set<std::pair<VertexId, VertexId>> pair_set(const QueryResult& qr) {
  auto p = reachable_pairs(qr);
  return {p.begin(), p.end()};
}

}  // namespace

TEST_SUITE("gll") {

TEST_CASE("step functions replay the two-vertex trace row by row") {
  Graph g = two_vertex();
  ExtendedRsm x = anbn_machine();
  Engine e(x, g);
  VertexId starts[] = {v(0)};
  e.initialize(starts);
  CHECK(e.queue_size() == 1);
  CHECK(e.gss_node_count() == 1);
  const GssNodeRef n0 = *e.find_gss_node(q(4), v(0));

  // row 2: call S from q4
  Descriptor d1{q(4), v(0), n0, Range::epsilon()};
  auto out2 = e.step_nonterminal(d1);
  REQUIRE(e.find_gss_node(q(0), v(0)).has_value());
  const GssNodeRef n1 = *e.find_gss_node(q(0), v(0));
  CHECK(out2 == std::vector<Descriptor>{{q(0), v(0), n1, Range::epsilon()}});
  REQUIRE(e.gss_node(n1).edges.size() == 1);
  CHECK(e.gss_node(n1).edges[0].return_state == q(5));
  CHECK(e.gss_node(n1).edges[0].caller_range.empty);
  CHECK(e.gss_node(n1).edges[0].target == n0);
  for (const auto& d : out2) CHECK(e.add_descriptor(d));

  // row 3: terminal a
  Descriptor d2 = out2[0];
  auto out3 = e.step_terminal(d2);
  CHECK(out3 == std::vector<Descriptor>{{q(1), v(0), n1, rng(0, 0, 1, 0)}});
  CHECK(e.index().contains({pt(0, 0), pt(1, 0)}, IndexEntry::terminal(*g.find_label("a"))));

  // row 4: recursive call is a self loop and the restarted descriptor is a duplicate
  Descriptor d3 = out3[0];
  auto out4 = e.step_nonterminal(d3);
  CHECK(contains(out4, {q(0), v(0), n1, Range::epsilon()}));
  CHECK(e.gss_node_count() == 2);
  CHECK(e.gss_node(n1).edges.size() == 2);
  CHECK(e.gss_node(n1).edges[1].target == n1);
  CHECK(e.gss_node(n1).edges[1].caller_range == rng(0, 0, 1, 0));
  CHECK_FALSE(e.add_descriptor({q(0), v(0), n1, Range::epsilon()}));

  // q1 -b-> q3 over v0 -b-> v1
  auto out_b = e.step_terminal(d3);
  Descriptor d4{q(3), v(1), n1, rng(0, 0, 3, 1)};
  CHECK(out_b == std::vector<Descriptor>{d4});
  CHECK(e.add_descriptor(d4));

  // row 5: pop S at v1 to both callers
  auto out5 = e.step_final(d4);
  CHECK(out5.size() == 2);
  CHECK(contains(out5, {q(5), v(1), n0, rng(4, 0, 5, 1)}));
  Descriptor d5{q(2), v(1), n1, rng(0, 0, 2, 1)};
  CHECK(contains(out5, d5));
  const auto S = IndexEntry::nonterminal(0);
  CHECK(e.index().contains({pt(4, 0), pt(5, 1)}, S));
  CHECK(e.index().contains({pt(1, 0), pt(2, 1)}, S));
  CHECK(e.index().contains({pt(0, 0), pt(2, 1)}, IndexEntry::intermediate(pt(1, 0))));
  CHECK(e.gss_node(n1).stored_pops == std::vector<Range>{rng(0, 0, 3, 1)});

  // row 6: b back to v0
  auto out6 = e.step_terminal(d5);
  Descriptor d6{q(3), v(0), n1, rng(0, 0, 3, 0)};
  CHECK(out6 == std::vector<Descriptor>{d6});
  CHECK(e.index().contains({pt(2, 1), pt(3, 0)}, IndexEntry::terminal(*g.find_label("b"))));
  CHECK(e.index().contains({pt(0, 0), pt(3, 0)}, IndexEntry::intermediate(pt(2, 1))));

  // row 7: pop at v0 reaches the start box
  auto out7 = e.step_final(d6);
  CHECK(contains(out7, {q(5), v(0), n0, rng(4, 0, 5, 0)}));
  CHECK(e.index().contains({pt(4, 0), pt(5, 0)}, S));

  // row 8: a descriptor already seen is dropped
  CHECK_FALSE(e.add_descriptor(d4));
}

TEST_CASE("run reports both pairs and terminates") {
  Graph g = two_vertex();
  ExtendedRsm x = anbn_machine();
  VertexId starts[] = {v(0)};
  QueryResult qr = run_query(x, g, starts);
  CHECK(pair_set(qr) == std::set<std::pair<VertexId, VertexId>>{{v(0), v(0)}, {v(0), v(1)}});
  for (const Accepted& a : qr.accepted) CHECK(a.root.to.state == x.after_call());
  CHECK(qr.diagnostics.gss_node_count == 2);
  CHECK(qr.diagnostics.descriptor_count > 0);
}

TEST_CASE("empty and multiple start sets") {
  Graph g = two_vertex();
  ExtendedRsm x = anbn_machine();
  Engine none(x, g);
  none.initialize({});
  CHECK(none.queue_size() == 0);
  CHECK(none.run().accepted.empty());

  Engine both(x, g);
  VertexId starts[] = {v(0), v(1)};
  both.initialize(starts);
  CHECK(both.queue_size() == 2);
  CHECK(both.gss_node_count() == 2);

  Engine bad(x, g);
  VertexId out_of_range[] = {v(7)};
  CHECK_THROWS_AS(bad.initialize(out_of_range), EngineError);
}

TEST_CASE("empty word grammar accepts every start at itself") {
  Graph g = two_vertex();
  ExtendedRsm x = extend_rsm(build_rsm(parse_grammar_text("S -> eps")));
  VertexId starts[] = {v(1)};
  QueryResult qr = run_query(x, g, starts);
  CHECK(pair_set(qr) == std::set<std::pair<VertexId, VertexId>>{{v(1), v(1)}});
  const StateId s0 = x.machine().box(0).start;
  CHECK(qr.index.contains({{s0, v(1)}, {s0, v(1)}}, IndexEntry::epsilon()));
}

TEST_CASE("a pop with no callers is still stored") {
  Graph g = two_vertex();
  ExtendedRsm x = anbn_machine();
  Engine e(x, g);
  VertexId starts[] = {v(0)};
  e.initialize(starts);
  Descriptor d{q(3), v(1), *e.find_gss_node(q(4), v(0)), rng(0, 0, 3, 1)};
  // the start-box node has no outgoing edges
  CHECK(e.step_final(d).empty());
  CHECK(e.gss_node(d.gss).stored_pops.size() == 1);
  CHECK(e.step_terminal({q(3), v(1), d.gss, Range::epsilon()}).empty());
}

TEST_CASE("late callers receive stored pops") {
  // A is entered twice at the same vertex; the second call arrives after A already popped
  Graph g = Graph::from_text("0 x 1\n1 y 2\n");
  ExtendedRsm x = extend_rsm(build_rsm(parse_grammar_text("S -> A y | B\nB -> A y\nA -> x")));
  for (QueueOrder order : {QueueOrder::Fifo, QueueOrder::Lifo}) {
    EngineOptions opt;
    opt.order = order;
    VertexId starts[] = {v(0)};
    QueryResult qr = run_query(x, g, starts, opt);
    CHECK(pair_set(qr) == std::set<std::pair<VertexId, VertexId>>{{v(0), v(2)}});
  }
}

TEST_CASE("regular queries run through the same engine") {
  Graph g = two_vertex();
  VertexId starts[] = {v(0)};
  auto pairs = [&](const char* re) { return pair_set(run_rpq(parse_regex_text(re), g, starts)); };
  std::set<std::pair<VertexId, VertexId>> all{{v(0), v(0)}, {v(0), v(1)}};
  CHECK(pairs("(a | b)*") == all);
  CHECK(pairs("a* b*") == all);
  CHECK(pairs("b b") == std::set<std::pair<VertexId, VertexId>>{{v(0), v(0)}});
  Graph empty;
  CHECK(run_rpq(parse_regex_text("(a | b | c)+"), empty, {}).accepted.empty());
}

TEST_CASE("on_accept fires once per pair and the trace records rejections") {
  Graph g = two_vertex();
  ExtendedRsm x = anbn_machine();
  EngineOptions opt;
  opt.record_trace = true;
  std::vector<std::pair<VertexId, VertexId>> seen;
  opt.on_accept = [&](VertexId s, VertexId t) { seen.emplace_back(s, t); };
  VertexId starts[] = {v(0)};
  QueryResult qr = run_query(x, g, starts, opt);
  CHECK(seen.size() == 2);
  auto rejected = std::count_if(qr.trace.begin(), qr.trace.end(),
                                [](const TraceEvent& t) { return t.kind == TraceEvent::Kind::Rejected; });
  CHECK(static_cast<std::size_t>(rejected) == qr.diagnostics.rejected_descriptors);
  CHECK(rejected > 0);
}

TEST_CASE("index invariants on random instances") {
  for (const auto& inst : testing::cfpq_instances(60, 99)) {
    CAPTURE(inst.seed);
    ExtendedRsm x = extend_rsm(build_rsm(parse_grammar_text(inst.grammar.text)));
    const Rsm& m = x.machine();
    EngineOptions opt;
    opt.audit_handled = true;
    QueryResult qr = run_query(x, inst.graph, inst.starts, opt);
    CHECK(qr.diagnostics.reprocessed_descriptors == 0);

    std::set<std::pair<StateId, VertexId>> nodes;
    for (const Cell& c : qr.index.cells()) {
      for (const IndexEntry& e : qr.index.entries(c)) {
        switch (e.kind) {
          case IndexEntry::Kind::Terminal: {
            CHECK(inst.graph.has_edge(c.from.vertex, LabelId{e.value}, c.to.vertex));
            auto ts = m.transitions_from(c.from.state);
            CHECK(std::any_of(ts.begin(), ts.end(), [&](const RsmTransition& t) {
              return t.to == c.to.state && t.label == RsmLabel::terminal(inst.graph.label_name(LabelId{e.value}));
            }));
            break;
          }
          case IndexEntry::Kind::Nonterminal: {
            auto ts = m.transitions_from(c.from.state);
            CHECK(std::any_of(ts.begin(), ts.end(), [&](const RsmTransition& t) {
              return t.to == c.to.state && t.label == RsmLabel::call(m.box(e.value).nonterminal);
            }));
            break;
          }
          case IndexEntry::Kind::Intermediate:
            CHECK(qr.index.contains(Cell{c.from, e.point}));
            CHECK(qr.index.contains(Cell{e.point, c.to}));
            break;
          case IndexEntry::Kind::Epsilon:
            CHECK(c.from == c.to);
            CHECK(m.is_final(c.from.state));
            break;
        }
      }
    }
  }
}

TEST_CASE("path index equality is set equality") {
  PathIndex a, b;
  Cell c{pt(0, 0), pt(1, 1)};
  a.add(c, IndexEntry::terminal(LabelId{0}));
  a.add(c, IndexEntry::intermediate(pt(2, 2)));
  b.add(c, IndexEntry::intermediate(pt(2, 2)));
  CHECK_FALSE(a == b);
  CHECK(b.add(c, IndexEntry::terminal(LabelId{0})));
  CHECK_FALSE(b.add(c, IndexEntry::terminal(LabelId{0})));
  CHECK(a == b);
  CHECK(a.entry_count() == 2);
  CHECK(a.cells() == std::vector<Cell>{c});
  CHECK(a.entries(Cell{pt(9, 9), pt(9, 9)}).empty());
}

}
