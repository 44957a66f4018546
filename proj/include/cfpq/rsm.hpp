#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfpq/automaton.hpp"
#include "cfpq/grammar.hpp"
#include "cfpq/ids.hpp"

namespace cfpq {

class RsmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transition label of a box. Calls name the callee nonterminal rather than its
/// start state; the two are interchangeable and names survive renumbering.
struct RsmLabel {
  enum class Kind : std::uint8_t { Terminal, Call, EndMarker };

  Kind kind = Kind::Terminal;
  std::string name;

  static RsmLabel terminal(std::string name) { return {Kind::Terminal, std::move(name)}; }
  static RsmLabel call(std::string nonterminal) { return {Kind::Call, std::move(nonterminal)}; }
  static RsmLabel end_marker() { return {Kind::EndMarker, "$"}; }

  friend bool operator==(const RsmLabel&, const RsmLabel&) = default;
  friend auto operator<=>(const RsmLabel&, const RsmLabel&) = default;
};

struct RsmTransition {
  StateId from;
  RsmLabel label;
  StateId to;

  friend bool operator==(const RsmTransition&, const RsmTransition&) = default;
};

struct Box {
  std::string nonterminal;
  std::vector<StateId> states;
  StateId start;
  std::vector<StateId> finals;
  std::vector<RsmTransition> transitions;

  friend bool operator==(const Box&, const Box&) = default;
};

/// A set of deterministic, epsilon-free boxes, one per nonterminal. State ids
/// are global across boxes.
class Rsm {
 public:
  Rsm() = default;
  /// Validates every box and call target; throws RsmError naming the violated rule.
  Rsm(std::vector<Box> boxes, std::string start_nonterminal,
      std::vector<std::string> state_names = {});

  std::span<const Box> boxes() const { return boxes_; }
  const Box& box(std::size_t index) const { return boxes_.at(index); }
  std::optional<std::size_t> find_box(std::string_view nonterminal) const;
  std::size_t start_box() const { return start_box_; }
  const std::string& start_nonterminal() const { return boxes_.at(start_box_).nonterminal; }

  std::size_t state_count() const { return state_count_; }
  /// One past the largest state id.
  std::size_t state_capacity() const { return box_of_.size(); }
  bool contains(StateId q) const;
  std::size_t box_of(StateId q) const { return box_of_.at(q.value); }
  bool is_final(StateId q) const { return final_.at(q.value); }
  const std::string& state_name(StateId q) const { return names_.at(q.value); }

  /// Outgoing transitions of `q`, calls first, then terminals, then the end marker.
  std::span<const RsmTransition> transitions_from(StateId q) const;
  std::size_t transition_count() const;
  bool has_end_marker() const;
  std::vector<std::string> terminals() const;

  /// Box `index` as a standalone DFA, for structural comparisons.
  Dfa box_dfa(std::size_t index) const;

  friend bool operator==(const Rsm& a, const Rsm& b) {
    return a.boxes_ == b.boxes_ && a.start_box_ == b.start_box_ && a.names_ == b.names_;
  }

 private:
  static constexpr std::uint32_t kNoBox = 0xffffffffu;

  std::vector<Box> boxes_;
  std::size_t start_box_ = 0;
  std::size_t state_count_ = 0;
  std::vector<std::uint32_t> box_of_;
  std::vector<bool> final_;
  std::vector<std::string> names_;
  std::vector<std::size_t> delta_offsets_;
  std::vector<RsmTransition> delta_;
};

/// RSM plus the synthetic start box S' = {q'0 -call S-> q'1 -$-> q'2}.
class ExtendedRsm {
 public:
  static constexpr std::string_view kStartBoxName = "S'";

  /// Accepts a machine whose start box already has the extended shape.
  static ExtendedRsm from_machine(Rsm machine);

  const Rsm& machine() const { return machine_; }
  const Rsm& inner() const { return inner_; }
  std::size_t start_box() const { return machine_.start_box(); }
  StateId entry() const { return entry_; }
  StateId after_call() const { return after_call_; }
  StateId accept() const { return accept_; }

 private:
  friend ExtendedRsm extend_rsm(const Rsm& r);

  Rsm inner_;
  Rsm machine_;
  StateId entry_{};
  StateId after_call_{};
  StateId accept_{};
};

/// Explicit construction of a machine with caller-chosen state names; ids follow
/// the order in which states are first mentioned.
class RsmBuilder {
 public:
  RsmBuilder& box(std::string nonterminal);
  RsmBuilder& state(const std::string& name);
  RsmBuilder& start(const std::string& name);
  RsmBuilder& final_state(const std::string& name);
  RsmBuilder& terminal(const std::string& from, std::string label, const std::string& to);
  RsmBuilder& call(const std::string& from, std::string nonterminal, const std::string& to);
  RsmBuilder& end_marker(const std::string& from, const std::string& to);
  RsmBuilder& start_nonterminal(std::string nonterminal);

  Rsm build() const;
  ExtendedRsm build_extended() const;

 private:
  StateId id_of(const std::string& name);
  StateId member(const std::string& name);
  Box& current();

  std::vector<Box> boxes_;
  std::vector<std::string> names_;
  std::string start_nonterminal_;
};

Rsm build_rsm(const EbnfGrammar& g);
Rsm build_rsm_from_bnf(const BnfGrammar& g);
ExtendedRsm extend_rsm(const Rsm& r);

/// Graphviz rendering: one cluster per box, double circles for finals, dashed call edges.
std::string rsm_to_dot(const Rsm& r);

}  // namespace cfpq
