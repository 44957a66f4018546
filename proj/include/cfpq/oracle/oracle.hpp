#pragma once

// Brute-force reference procedures for tests. Nothing here touches the RSM,
// the automaton builder or the GLL engine.

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"

namespace cfpq::oracle {

using Word = std::vector<std::string>;
using Pair = std::pair<VertexId, VertexId>;

bool cyk_membership(const Word& word, const CnfGrammar& g);
bool cyk_membership(const Graph& graph, const Path& p, const CnfGrammar& g);

/// Calls `visit` on every path from `source` with at most `max_len` edges,
/// shortest first. Returning false from `visit` stops the walk.
void for_each_path_bounded(const Graph& g, VertexId source, std::size_t max_len,
                           const std::function<bool(const Path&)>& visit);
std::vector<Path> enumerate_paths_bounded(const Graph& g, VertexId source, std::size_t max_len);

struct OracleReport {
  std::set<Pair> pairs;
  std::map<Pair, Path> witness;  // a shortest accepted path per pair
  std::size_t bound = 0;
};

OracleReport cfpq_oracle(const Graph& g, const CnfGrammar& grammar, std::span<const VertexId> starts,
                         std::size_t max_len);

/// Product of a Thompson automaton with the graph, searched breadth-first.
std::set<Pair> rpq_oracle(const Graph& g, const Regex& regex, std::span<const VertexId> starts);

bool regex_accepts(const Regex& regex, const Word& word);

/// All terminal words of length <= max_len derivable from the start symbol.
std::set<Word> bnf_words_up_to(const BnfGrammar& g, std::size_t max_len);

}  // namespace cfpq::oracle
