#include "cfpq/rsm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace cfpq {

Rsm::Rsm(std::vector<Box> boxes, std::string start_nonterminal,
         std::vector<std::string> state_names)
    : boxes_(std::move(boxes)) {
  std::set<std::string> seen_boxes;
  std::uint32_t capacity = 0;
  for (const Box& b : boxes_) {
    if (!seen_boxes.insert(b.nonterminal).second) {
      throw RsmError("duplicate box for nonterminal `" + b.nonterminal + "`");
    }
    for (StateId q : b.states) capacity = std::max(capacity, q.value + 1);
  }
  auto start = find_box(start_nonterminal);
  if (!start) throw RsmError("start nonterminal `" + start_nonterminal + "` has no box");
  start_box_ = *start;

  box_of_.assign(capacity, kNoBox);
  final_.assign(capacity, false);
  names_ = std::move(state_names);
  names_.resize(capacity);
  for (std::uint32_t i = 0; i < capacity; ++i) {
    if (names_[i].empty()) names_[i] = "q" + std::to_string(i);
  }

  for (std::size_t bi = 0; bi < boxes_.size(); ++bi) {
    const Box& b = boxes_[bi];
    for (StateId q : b.states) {
      if (box_of_[q.value] != kNoBox) {
        throw RsmError("state " + names_[q.value] + " belongs to more than one box");
      }
      box_of_[q.value] = static_cast<std::uint32_t>(bi);
      ++state_count_;
    }
  }
  auto in_box = [&](StateId q, std::size_t bi) {
    return q.value < capacity && box_of_[q.value] == bi;
  };
  for (std::size_t bi = 0; bi < boxes_.size(); ++bi) {
    const Box& b = boxes_[bi];
    if (!in_box(b.start, bi)) {
      throw RsmError("start state of box `" + b.nonterminal + "` is not in the box");
    }
    for (StateId f : b.finals) {
      if (!in_box(f, bi)) {
        throw RsmError("final state " +
                       (f.value < capacity ? names_[f.value] : "q" + std::to_string(f.value)) +
                       " is not in box `" + b.nonterminal + "`");
      }
      final_[f.value] = true;
    }
    std::set<std::pair<StateId, RsmLabel>> keys;
    for (const RsmTransition& t : b.transitions) {
      if (!in_box(t.from, bi) || !in_box(t.to, bi)) {
        throw RsmError("transition leaves box `" + b.nonterminal + "`");
      }
      if (t.label.kind == RsmLabel::Kind::Call && !find_box(t.label.name)) {
        throw RsmError("call to nonterminal `" + t.label.name + "` which has no box");
      }
      if (!keys.insert({t.from, t.label}).second) {
        throw RsmError("box not deterministic: `" + b.nonterminal + "` has two transitions on `" +
                       t.label.name + "` from " + names_[t.from.value]);
      }
    }
  }

  std::vector<RsmTransition> all;
  for (const Box& b : boxes_) all.insert(all.end(), b.transitions.begin(), b.transitions.end());
  std::stable_sort(all.begin(), all.end(), [](const RsmTransition& x, const RsmTransition& y) {
    auto rank = [](RsmLabel::Kind k) {
      return k == RsmLabel::Kind::Call ? 0 : k == RsmLabel::Kind::Terminal ? 1 : 2;
    };
    return std::pair(x.from, rank(x.label.kind)) < std::pair(y.from, rank(y.label.kind));
  });
  delta_ = std::move(all);
  delta_offsets_.assign(capacity + 1, 0);
  for (const auto& t : delta_) ++delta_offsets_[t.from.value + 1];
  for (std::size_t i = 1; i < delta_offsets_.size(); ++i) delta_offsets_[i] += delta_offsets_[i - 1];
}

std::optional<std::size_t> Rsm::find_box(std::string_view nonterminal) const {
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    if (boxes_[i].nonterminal == nonterminal) return i;
  }
  return std::nullopt;
}

bool Rsm::contains(StateId q) const {
  return q.value < box_of_.size() && box_of_[q.value] != kNoBox;
}

std::span<const RsmTransition> Rsm::transitions_from(StateId q) const {
  if (q.value >= box_of_.size()) return {};
  return std::span<const RsmTransition>(delta_).subspan(
      delta_offsets_[q.value], delta_offsets_[q.value + 1] - delta_offsets_[q.value]);
}

std::size_t Rsm::transition_count() const { return delta_.size(); }

bool Rsm::has_end_marker() const {
  return std::any_of(delta_.begin(), delta_.end(),
                     [](const RsmTransition& t) { return t.label.kind == RsmLabel::Kind::EndMarker; });
}

std::vector<std::string> Rsm::terminals() const {
  std::set<std::string> names;
  for (const auto& t : delta_) {
    if (t.label.kind == RsmLabel::Kind::Terminal) names.insert(t.label.name);
  }
  return {names.begin(), names.end()};
}

Dfa Rsm::box_dfa(std::size_t index) const {
  const Box& b = boxes_.at(index);
  std::map<StateId, std::uint32_t> local;
  for (StateId q : b.states) local.emplace(q, static_cast<std::uint32_t>(local.size()));
  Dfa d;
  d.start = local.at(b.start);
  d.finals.assign(local.size(), false);
  d.next.resize(local.size());
  for (StateId f : b.finals) d.finals[local.at(f)] = true;
  for (const auto& t : b.transitions) {
    Symbol s = t.label.kind == RsmLabel::Kind::Call ? Symbol::nonterminal(t.label.name)
                                                    : Symbol::terminal(t.label.name);
    d.next[local.at(t.from)][s] = local.at(t.to);
  }
  return d;
}

// ---------------------------------------------------------------------------

ExtendedRsm extend_rsm(const Rsm& r) {
  if (r.has_end_marker()) throw RsmError("machine already contains the end marker; cannot extend twice");
  if (r.find_box(ExtendedRsm::kStartBoxName)) {
    throw RsmError("machine already has a box named S'");
  }
  const auto base = static_cast<std::uint32_t>(r.state_capacity());
  StateId q0{base}, q1{base + 1}, q2{base + 2};

  std::vector<Box> boxes(r.boxes().begin(), r.boxes().end());
  Box start;
  start.nonterminal = std::string(ExtendedRsm::kStartBoxName);
  start.states = {q0, q1, q2};
  start.start = q0;
  start.finals = {q2};
  start.transitions = {{q0, RsmLabel::call(r.start_nonterminal()), q1},
                       {q1, RsmLabel::end_marker(), q2}};
  boxes.push_back(std::move(start));

  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < base; ++i) names.push_back(r.state_name(StateId{i}));

  ExtendedRsm ext;
  ext.inner_ = r;
  ext.machine_ = Rsm(std::move(boxes), std::string(ExtendedRsm::kStartBoxName), std::move(names));
  ext.entry_ = q0;
  ext.after_call_ = q1;
  ext.accept_ = q2;
  return ext;
}

ExtendedRsm ExtendedRsm::from_machine(Rsm machine) {
  const Box& sb = machine.box(machine.start_box());
  auto malformed = [](const std::string& why) {
    return RsmError("start box is not an extended start box: " + why);
  };
  if (sb.states.size() != 3) throw malformed("expected 3 states");
  if (sb.transitions.size() != 2) throw malformed("expected 2 transitions");
  if (sb.finals.size() != 1) throw malformed("expected exactly one final state");
  auto first = machine.transitions_from(sb.start);
  if (first.size() != 1 || first[0].label.kind != RsmLabel::Kind::Call) {
    throw malformed("start state must have a single call transition");
  }
  StateId middle = first[0].to;
  auto second = machine.transitions_from(middle);
  if (second.size() != 1 || second[0].label.kind != RsmLabel::Kind::EndMarker) {
    throw malformed("the call must be followed by the end marker");
  }
  if (second[0].to != sb.finals.front()) throw malformed("end marker must lead to the final state");
  std::size_t markers = 0;
  for (const Box& b : machine.boxes()) {
    for (const auto& t : b.transitions) markers += t.label.kind == RsmLabel::Kind::EndMarker;
  }
  if (markers != 1) throw malformed("end marker used outside the start box");

  std::vector<Box> inner_boxes;
  for (std::size_t i = 0; i < machine.boxes().size(); ++i) {
    if (i != machine.start_box()) inner_boxes.push_back(machine.box(i));
  }
  std::vector<std::string> names;
  for (std::uint32_t i = 0; i < machine.state_capacity(); ++i) {
    names.push_back(machine.contains(StateId{i}) ? machine.state_name(StateId{i}) : std::string());
  }

  ExtendedRsm ext;
  ext.inner_ = Rsm(std::move(inner_boxes), first[0].label.name, names);
  ext.entry_ = sb.start;
  ext.after_call_ = middle;
  ext.accept_ = sb.finals.front();
  ext.machine_ = std::move(machine);
  return ext;
}

// ---------------------------------------------------------------------------

Box& RsmBuilder::current() {
  if (boxes_.empty()) throw RsmError("builder: declare a box first");
  return boxes_.back();
}

StateId RsmBuilder::id_of(const std::string& name) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return StateId{static_cast<std::uint32_t>(it - names_.begin())};
  names_.push_back(name);
  return StateId{static_cast<std::uint32_t>(names_.size() - 1)};
}

StateId RsmBuilder::member(const std::string& name) {
  StateId q = id_of(name);
  for (const Box& b : boxes_) {
    if (std::find(b.states.begin(), b.states.end(), q) != b.states.end()) {
      if (&b != &boxes_.back()) {
        throw RsmError("builder: state " + name + " already belongs to box `" + b.nonterminal + "`");
      }
      return q;
    }
  }
  current().states.push_back(q);
  return q;
}

RsmBuilder& RsmBuilder::box(std::string nonterminal) {
  Box b;
  b.nonterminal = std::move(nonterminal);
  b.start = StateId{0xffffffffu};
  boxes_.push_back(std::move(b));
  return *this;
}

RsmBuilder& RsmBuilder::state(const std::string& name) {
  member(name);
  return *this;
}

RsmBuilder& RsmBuilder::start(const std::string& name) {
  current().start = member(name);
  return *this;
}

RsmBuilder& RsmBuilder::final_state(const std::string& name) {
  // deliberately not auto-declared: a final must be a state of this box
  current().finals.push_back(id_of(name));
  return *this;
}

RsmBuilder& RsmBuilder::terminal(const std::string& from, std::string label, const std::string& to) {
  StateId f = member(from);
  StateId t = member(to);
  current().transitions.push_back({f, RsmLabel::terminal(std::move(label)), t});
  return *this;
}

RsmBuilder& RsmBuilder::call(const std::string& from, std::string nonterminal, const std::string& to) {
  StateId f = member(from);
  StateId t = member(to);
  current().transitions.push_back({f, RsmLabel::call(std::move(nonterminal)), t});
  return *this;
}

RsmBuilder& RsmBuilder::end_marker(const std::string& from, const std::string& to) {
  StateId f = member(from);
  StateId t = member(to);
  current().transitions.push_back({f, RsmLabel::end_marker(), t});
  return *this;
}

RsmBuilder& RsmBuilder::start_nonterminal(std::string nonterminal) {
  start_nonterminal_ = std::move(nonterminal);
  return *this;
}

Rsm RsmBuilder::build() const {
  if (boxes_.empty()) throw RsmError("builder: no boxes");
  for (const Box& b : boxes_) {
    if (b.start.value == 0xffffffffu) throw RsmError("box `" + b.nonterminal + "` has no start state");
  }
  std::string start = start_nonterminal_.empty() ? boxes_.front().nonterminal : start_nonterminal_;
  return Rsm(boxes_, start, names_);
}

ExtendedRsm RsmBuilder::build_extended() const { return ExtendedRsm::from_machine(build()); }

// ---------------------------------------------------------------------------

namespace {

void append_box(std::vector<Box>& boxes, std::uint32_t& next_id, const std::string& nonterminal,
                const Dfa& dfa) {
  Box b;
  b.nonterminal = nonterminal;
  const std::uint32_t base = next_id;
  for (std::uint32_t i = 0; i < dfa.state_count(); ++i) b.states.push_back(StateId{base + i});
  b.start = StateId{base + dfa.start};
  for (std::uint32_t i = 0; i < dfa.state_count(); ++i) {
    if (dfa.finals[i]) b.finals.push_back(StateId{base + i});
    for (const auto& [sym, to] : dfa.next[i]) {
      RsmLabel label = sym.is_terminal() ? RsmLabel::terminal(sym.name) : RsmLabel::call(sym.name);
      b.transitions.push_back({StateId{base + i}, std::move(label), StateId{base + to}});
    }
  }
  // transitions listed in the box's canonical state order
  next_id += static_cast<std::uint32_t>(dfa.state_count());
  boxes.push_back(std::move(b));
}

}  // namespace

Rsm build_rsm(const EbnfGrammar& g) {
  auto diagnostics = validate(g);
  if (!diagnostics.empty()) throw RsmError("invalid grammar: " + diagnostics.front().message);
  std::vector<Box> boxes;
  std::uint32_t next_id = 0;
  for (const auto& p : g.productions) append_box(boxes, next_id, p.lhs, regex_to_dfa(p.rhs));
  return Rsm(std::move(boxes), g.start);
}

Rsm build_rsm_from_bnf(const BnfGrammar& g) {
  auto nonterminals = g.nonterminals();
  if (std::find(nonterminals.begin(), nonterminals.end(), g.start) == nonterminals.end()) {
    throw RsmError("invalid grammar: start nonterminal `" + g.start + "` has no production");
  }
  for (const auto& p : g.productions) {
    for (const Symbol& s : p.rhs) {
      if (s.is_nonterminal() &&
          std::find(nonterminals.begin(), nonterminals.end(), s.name) == nonterminals.end()) {
        throw RsmError("invalid grammar: nonterminal `" + s.name + "` is used but never defined");
      }
    }
  }
  std::vector<Box> boxes;
  std::uint32_t next_id = 0;
  for (const auto& nt : nonterminals) {
    // prefix tree of the alternatives: deterministic, shares common prefixes only
    Dfa trie;
    trie.start = 0;
    trie.finals = {false};
    trie.next.resize(1);
    std::vector<std::string> order;
    for (const auto& p : g.productions) {
      if (p.lhs != nt) continue;
      std::uint32_t at = 0;
      for (const Symbol& s : p.rhs) {
        if (s.is_terminal() && std::find(order.begin(), order.end(), s.name) == order.end()) {
          order.push_back(s.name);
        }
        auto it = trie.next[at].find(s);
        if (it == trie.next[at].end()) {
          auto fresh = static_cast<std::uint32_t>(trie.finals.size());
          trie.finals.push_back(false);
          trie.next.emplace_back();
          trie.next[at][s] = fresh;
          at = fresh;
        } else {
          at = it->second;
        }
      }
      trie.finals[at] = true;
    }
    append_box(boxes, next_id, nt, canonical_order(trie, order));
  }
  return Rsm(std::move(boxes), g.start);
}

// ---------------------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string rsm_to_dot(const Rsm& r) {
  std::ostringstream out;
  out << "digraph rsm {\n  rankdir=LR;\n  node [shape=circle];\n";
  for (std::size_t bi = 0; bi < r.boxes().size(); ++bi) {
    const Box& b = r.box(bi);
    out << "  subgraph cluster_" << bi << " {\n";
    out << "    label=\"" << dot_escape(b.nonterminal) << "\";\n";
    out << "    start_" << bi << " [shape=point];\n";
    for (StateId q : b.states) {
      out << "    s" << q.value << " [label=\"" << dot_escape(r.state_name(q)) << "\"";
      if (r.is_final(q)) out << ", shape=doublecircle";
      out << "];\n";
    }
    out << "    start_" << bi << " -> s" << b.start.value << ";\n";
    for (const auto& t : b.transitions) {
      out << "    s" << t.from.value << " -> s" << t.to.value << " [label=\""
          << dot_escape(t.label.name) << "\"";
      if (t.label.kind == RsmLabel::Kind::Call) out << ", style=dashed";
      out << "];\n";
    }
    out << "  }\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace cfpq
