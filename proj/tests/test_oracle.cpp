#include <doctest.h>

#include "cfpq/oracle/oracle.hpp"
#include "support/worked.hpp"

using namespace cfpq;
using oracle::Word;

namespace {
constexpr VertexId v(std::uint32_t i) { return VertexId{i}; }
CnfGrammar cnf_of(const char* text) { return to_cnf(ebnf_to_bnf(parse_grammar_text(text))); }
}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("CYK on a^n b^n") {
  CnfGrammar g = cnf_of("S -> a b | a S b");
  CHECK(oracle::cyk_membership(Word{"a", "b"}, g));
  CHECK(oracle::cyk_membership(Word{"a", "a", "b", "b"}, g));
  CHECK_FALSE(oracle::cyk_membership(Word{"a", "a", "b"}, g));
  CHECK_FALSE(oracle::cyk_membership(Word{}, g));
  CHECK(oracle::cyk_membership(Word{}, cnf_of("S -> (a S b)*")));
}

TEST_CASE("bounded paths of the two-vertex graph") {
  Graph g = testing::two_vertex_graph();
  auto ps = oracle::enumerate_paths_bounded(g, v(0), 2);
  std::set<Word> words;
  for (const Path& p : ps) words.insert(word_names(g, p));
  CHECK(words == std::set<Word>{{}, {"a"}, {"b"}, {"a", "a"}, {"a", "b"}, {"b", "b"}});
  CHECK(ps.size() == 6);
  CHECK(ps.front().length() == 0);
}

TEST_CASE("brute-force CFPQ on the two-vertex graph") {
  Graph g = testing::two_vertex_graph();
  VertexId starts[] = {v(0), v(1)};
  auto r = oracle::cfpq_oracle(g, cnf_of("S -> a b | a S b"), starts, 8);
  CHECK(r.pairs == std::set<oracle::Pair>{{v(0), v(0)}, {v(0), v(1)}});
  CHECK(format_path(g, r.witness.at({v(0), v(1)})) == "v0 -a-> v0 -b-> v1");
  CHECK(r.witness.at({v(0), v(0)}).length() == 4);
  auto short_bound = oracle::cfpq_oracle(g, cnf_of("S -> a b | a S b"), starts, 3);
  CHECK(short_bound.pairs == std::set<oracle::Pair>{{v(0), v(1)}});
}

TEST_CASE("brute-force RPQ") {
  Graph g = testing::two_vertex_graph();
  VertexId from_v0[] = {v(0)};
  VertexId from_v1[] = {v(1)};
  CHECK(oracle::rpq_oracle(g, parse_regex_text("(a | b)*"), from_v0) ==
        std::set<oracle::Pair>{{v(0), v(0)}, {v(0), v(1)}});
  CHECK(oracle::rpq_oracle(g, parse_regex_text("a* b*"), from_v1) ==
        std::set<oracle::Pair>{{v(1), v(0)}, {v(1), v(1)}});
  CHECK(oracle::rpq_oracle(g, parse_regex_text("a+"), from_v1).empty());
  CHECK(oracle::regex_accepts(parse_regex_text("(a | b)+ (c | d)+"), Word{"a", "b", "d"}));
  CHECK_FALSE(oracle::regex_accepts(parse_regex_text("(a | b)+ (c | d)+"), Word{"c"}));
}

TEST_CASE("word sets of small grammars") {
  BnfGrammar g = ebnf_to_bnf(parse_grammar_text("S -> a b | a S b"));
  CHECK(oracle::bnf_words_up_to(g, 4) == std::set<Word>{{"a", "b"}, {"a", "a", "b", "b"}});
  CHECK(oracle::bnf_words_up_to(ebnf_to_bnf(parse_grammar_text("S -> eps")), 3) == std::set<Word>{{}});
}

}
