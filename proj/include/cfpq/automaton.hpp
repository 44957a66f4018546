#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfpq/grammar.hpp"

namespace cfpq {

/// Thompson NFA over grammar symbols. State 0 is not special; see `start`.
struct Nfa {
  struct Arc {
    std::uint32_t from;
    std::optional<Symbol> symbol;  // nullopt = epsilon
    std::uint32_t to;
  };

  std::uint32_t state_count = 0;
  std::uint32_t start = 0;
  std::uint32_t accept = 0;
  std::vector<Arc> arcs;
};

/// Partial deterministic automaton over grammar symbols (missing transitions reject).
struct Dfa {
  std::uint32_t start = 0;
  std::vector<bool> finals;
  std::vector<std::map<Symbol, std::uint32_t>> next;

  std::size_t state_count() const { return finals.size(); }
  std::size_t transition_count() const;
  std::optional<std::uint32_t> step(std::uint32_t state, const Symbol& s) const;
  bool accepts(std::span<const Symbol> word) const;
};

Nfa thompson(const Regex& r);
Dfa determinize(const Nfa& nfa);

/// Hopcroft partition refinement. The result has no unreachable or dead states.
Dfa minimize(const Dfa& dfa);

/// Renumbers states in depth-first pre-order from the start state, visiting
/// nonterminal calls before terminals and terminals in `terminal_order`
/// (symbols not listed sort after, by name). Unreachable states are dropped.
Dfa canonical_order(const Dfa& dfa, std::span<const std::string> terminal_order);

/// Thompson, subset construction, Hopcroft, canonical numbering.
Dfa regex_to_dfa(const Regex& r);

/// Structural equality up to state renaming (both automata must be trim).
bool isomorphic(const Dfa& a, const Dfa& b);

}  // namespace cfpq
