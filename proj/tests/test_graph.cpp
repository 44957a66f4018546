#include <doctest.h>

#include <sstream>

#include "cfpq/graph.hpp"

using namespace cfpq;

namespace {

const char* kTwoVertex = "# loop and a two-cycle\nv0 a v0\nv0 b v1\nv1 b v0\n";

}

TEST_SUITE("graph") {

TEST_CASE("edge list interns names in order of appearance") {
  Graph g = Graph::from_text(kTwoVertex);
  CHECK(g.vertex_count() == 2);
  CHECK(g.edge_count() == 3);
  CHECK(g.label_count() == 2);
  CHECK(g.vertex_name(VertexId{0}) == "v0");
  CHECK(g.label_name(LabelId{1}) == "b");
  CHECK(g.find_vertex("v1") == VertexId{1});
  CHECK_FALSE(g.find_vertex("v2").has_value());
}

TEST_CASE("outgoing returns targets per label") {
  Graph g = Graph::from_text(kTwoVertex);
  LabelId a = *g.find_label("a");
  LabelId b = *g.find_label("b");
  auto out = g.outgoing(VertexId{0}, b);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == VertexId{1});
  CHECK(g.outgoing(VertexId{1}, a).empty());
  CHECK(g.has_edge(VertexId{1}, b, VertexId{0}));
  CHECK_FALSE(g.has_edge(VertexId{1}, a, VertexId{0}));
}

TEST_CASE("parallel edges with different labels and repeated edges") {
  Graph g = Graph::from_text("x p y\nx q y\nx p z\n");
  auto p = g.outgoing(*g.find_vertex("x"), *g.find_label("p"));
  CHECK(p.size() == 2);
  CHECK(g.label_edge_count(*g.find_label("p")) == 2);
}

TEST_CASE("inverse edges are appended with the suffix") {
  EdgeListOptions opt;
  opt.add_inverse = true;
  Graph g = Graph::from_text(kTwoVertex, opt);
  CHECK(g.edge_count() == 6);
  auto br = g.find_label("b_r");
  REQUIRE(br.has_value());
  CHECK(g.has_edge(VertexId{1}, *br, VertexId{0}));
  CHECK(g.has_edge(VertexId{0}, *br, VertexId{1}));
  CHECK(g.edges()[3].label == *g.find_label("a_r"));

  opt.inverse_suffix = "^-1";
  Graph h = Graph::from_text("u r w\n", opt);
  CHECK(h.find_label("r^-1").has_value());
}

TEST_CASE("malformed lines report line and column") {
  try {
    Graph::from_text("a x b\n\nonly two\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(Graph::from_text("a b c d\n"), ParseError);
  CHECK_THROWS(Graph::load_edge_list_file("/nonexistent/graph.txt"));
}

TEST_CASE("blank lines and comments are skipped") {
  Graph g = Graph::from_text("\n# comment\n  \nx l y\n");
  CHECK(g.edge_count() == 1);
}

TEST_CASE("stats count vertices, edges and labels") {
  GraphStats s = Graph::from_text(kTwoVertex).stats();
  CHECK(s.vertex_count == 2);
  CHECK(s.edge_count == 3);
  REQUIRE(s.per_label.size() == 2);
  CHECK(s.per_label[0].name == "a");
  CHECK(s.per_label[0].edges == 1);
  CHECK(s.per_label[1].edges == 2);
}

TEST_CASE("edge list round trip") {
  Graph g = Graph::from_text(kTwoVertex);
  std::ostringstream out;
  g.write_edge_list(out);
  Graph h = Graph::from_text(out.str());
  CHECK(h.edge_count() == g.edge_count());
  for (const Edge& e : g.edges()) {
    CHECK(h.has_edge(*h.find_vertex(g.vertex_name(e.source)), *h.find_label(g.label_name(e.label)),
                     *h.find_vertex(g.vertex_name(e.target))));
  }
}

TEST_CASE("builder") {
  Graph::Builder b;
  b.vertex("isolated");
  b.edge("s", "l", "t");
  Graph g = std::move(b).build();
  CHECK(g.vertex_count() == 3);
  CHECK(g.outgoing(*g.find_vertex("isolated"), *g.find_label("l")).empty());
}

TEST_CASE("paths: word, validation and formatting") {
  Graph g = Graph::from_text(kTwoVertex);
  LabelId a = *g.find_label("a");
  LabelId b = *g.find_label("b");
  Path p{VertexId{0}, {{a, VertexId{0}}, {b, VertexId{1}}}};
  CHECK(p.end() == VertexId{1});
  CHECK(word_names(g, p) == std::vector<std::string>{"a", "b"});
  CHECK(format_path(g, p) == "v0 -a-> v0 -b-> v1");
  CHECK(format_path(g, Path{VertexId{1}, {}}) == "v1");

  Path bad{VertexId{1}, {{a, VertexId{1}}}};
  CHECK_THROWS_AS(word_of_path(g, bad), InvalidPath);
}

}
