#pragma once

// The two-vertex graph and the a^n b^n machine with states named q0..q6.

#include "cfpq/graph.hpp"
#include "cfpq/rsm.hpp"

namespace cfpq::testing {

inline Graph two_vertex_graph() { return Graph::from_text("v0 a v0\nv0 b v1\nv1 b v0\n"); }

inline ExtendedRsm anbn_machine() {
  RsmBuilder b;
  b.box("S").start("q0").terminal("q0", "a", "q1").call("q1", "S", "q2").terminal("q1", "b", "q3")
      .terminal("q2", "b", "q3").final_state("q3");
  b.box("S'").start("q4").call("q4", "S", "q5").end_marker("q5", "q6").final_state("q6");
  b.start_nonterminal("S'");
  return b.build_extended();
}

}  // namespace cfpq::testing
