#include "cfpq/automaton.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace cfpq {

std::size_t Dfa::transition_count() const {
  std::size_t n = 0;
  for (const auto& row : next) n += row.size();
  return n;
}

std::optional<std::uint32_t> Dfa::step(std::uint32_t state, const Symbol& s) const {
  const auto& row = next.at(state);
  auto it = row.find(s);
  if (it == row.end()) return std::nullopt;
  return it->second;
}

bool Dfa::accepts(std::span<const Symbol> word) const {
  if (finals.empty()) return false;
  std::uint32_t at = start;
  for (const Symbol& s : word) {
    auto n = step(at, s);
    if (!n) return false;
    at = *n;
  }
  return finals[at];
}

// ---------------------------------------------------------------------------

namespace {

class ThompsonBuilder {
 public:
  Nfa build(const Regex& r) {
    auto [s, a] = fragment(r);
    nfa_.start = s;
    nfa_.accept = a;
    return std::move(nfa_);
  }

 private:
  std::uint32_t state() { return nfa_.state_count++; }
  void eps(std::uint32_t from, std::uint32_t to) { nfa_.arcs.push_back({from, std::nullopt, to}); }

  std::pair<std::uint32_t, std::uint32_t> fragment(const Regex& r) {
    switch (r.kind) {
      case Regex::Kind::Epsilon: {
        auto s = state(), a = state();
        eps(s, a);
        return {s, a};
      }
      case Regex::Kind::Sym: {
        auto s = state(), a = state();
        nfa_.arcs.push_back({s, r.symbol, a});
        return {s, a};
      }
      case Regex::Kind::Concat: {
        auto [s, a] = fragment(r.children.front());
        for (std::size_t i = 1; i < r.children.size(); ++i) {
          auto [s2, a2] = fragment(r.children[i]);
          eps(a, s2);
          a = a2;
        }
        return {s, a};
      }
      case Regex::Kind::Union: {
        auto s = state(), a = state();
        for (const Regex& c : r.children) {
          auto [cs, ca] = fragment(c);
          eps(s, cs);
          eps(ca, a);
        }
        return {s, a};
      }
      case Regex::Kind::Star:
      case Regex::Kind::Plus:
      case Regex::Kind::Optional: {
        auto s = state(), a = state();
        auto [cs, ca] = fragment(r.children.front());
        eps(s, cs);
        eps(ca, a);
        if (r.kind != Regex::Kind::Plus) eps(s, a);
        if (r.kind != Regex::Kind::Optional) eps(ca, cs);
        return {s, a};
      }
    }
    return {0, 0};
  }

  Nfa nfa_;
};

}  // namespace

Nfa thompson(const Regex& r) { return ThompsonBuilder().build(r); }

Dfa determinize(const Nfa& nfa) {
  std::vector<std::vector<std::uint32_t>> eps_out(nfa.state_count);
  std::vector<std::vector<std::pair<Symbol, std::uint32_t>>> sym_out(nfa.state_count);
  for (const auto& arc : nfa.arcs) {
    if (arc.symbol) {
      sym_out[arc.from].emplace_back(*arc.symbol, arc.to);
    } else {
      eps_out[arc.from].push_back(arc.to);
    }
  }
  auto closure = [&](std::set<std::uint32_t> states) {
    std::vector<std::uint32_t> stack(states.begin(), states.end());
    while (!stack.empty()) {
      auto s = stack.back();
      stack.pop_back();
      for (auto t : eps_out[s]) {
        if (states.insert(t).second) stack.push_back(t);
      }
    }
    return states;
  };

  Dfa dfa;
  std::map<std::set<std::uint32_t>, std::uint32_t> ids;
  std::deque<std::set<std::uint32_t>> work;
  auto intern = [&](std::set<std::uint32_t> set) {
    auto [it, inserted] = ids.try_emplace(set, static_cast<std::uint32_t>(dfa.finals.size()));
    if (inserted) {
      dfa.finals.push_back(set.contains(nfa.accept));
      dfa.next.emplace_back();
      work.push_back(std::move(set));
    }
    return it->second;
  };
  dfa.start = intern(closure({nfa.start}));
  while (!work.empty()) {
    auto set = std::move(work.front());
    work.pop_front();
    const auto from = ids.at(set);
    std::map<Symbol, std::set<std::uint32_t>> moves;
    for (auto s : set) {
      for (const auto& [sym, to] : sym_out[s]) moves[sym].insert(to);
    }
    for (auto& [sym, targets] : moves) {
      auto to = intern(closure(std::move(targets)));
      dfa.next[from][sym] = to;
    }
  }
  return dfa;
}

Dfa minimize(const Dfa& dfa) {
  const auto n = static_cast<std::uint32_t>(dfa.state_count());
  if (n == 0) return dfa;

  // Complete the automaton with an explicit sink so Hopcroft's splitters are exact.
  std::vector<Symbol> alphabet;
  for (const auto& row : dfa.next) {
    for (const auto& [sym, to] : row) alphabet.push_back(sym);
  }
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  const std::uint32_t sink = n;
  const std::uint32_t total = n + 1;
  const auto k = alphabet.size();
  std::vector<std::uint32_t> delta(static_cast<std::size_t>(total) * k, sink);
  for (std::uint32_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < k; ++a) {
      if (auto t = dfa.step(s, alphabet[a])) delta[s * k + a] = *t;
    }
  }
  std::vector<std::vector<std::vector<std::uint32_t>>> inverse(
      k, std::vector<std::vector<std::uint32_t>>(total));
  for (std::uint32_t s = 0; s < total; ++s) {
    for (std::size_t a = 0; a < k; ++a) inverse[a][delta[s * k + a]].push_back(s);
  }

  std::vector<std::vector<std::uint32_t>> blocks;
  std::vector<std::uint32_t> block_of(total);
  {
    std::vector<std::uint32_t> accepting, rejecting;
    for (std::uint32_t s = 0; s < total; ++s) {
      (s < n && dfa.finals[s] ? accepting : rejecting).push_back(s);
    }
    for (auto* b : {&accepting, &rejecting}) {
      if (b->empty()) continue;
      for (auto s : *b) block_of[s] = static_cast<std::uint32_t>(blocks.size());
      blocks.push_back(std::move(*b));
    }
  }
  std::set<std::pair<std::uint32_t, std::size_t>> work;
  for (std::uint32_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t a = 0; a < k; ++a) work.insert({b, a});
  }
  while (!work.empty()) {
    auto [splitter, a] = *work.begin();
    work.erase(work.begin());
    std::set<std::uint32_t> pre;
    for (auto t : blocks[splitter]) {
      for (auto s : inverse[a][t]) pre.insert(s);
    }
    std::map<std::uint32_t, std::vector<std::uint32_t>> hit;
    for (auto s : pre) hit[block_of[s]].push_back(s);
    for (auto& [b, inside] : hit) {
      if (inside.size() == blocks[b].size()) continue;
      std::vector<std::uint32_t> outside;
      std::set<std::uint32_t> in_set(inside.begin(), inside.end());
      for (auto s : blocks[b]) {
        if (!in_set.contains(s)) outside.push_back(s);
      }
      const auto fresh = static_cast<std::uint32_t>(blocks.size());
      auto& smaller = inside.size() <= outside.size() ? inside : outside;
      auto& larger = inside.size() <= outside.size() ? outside : inside;
      blocks[b] = std::move(larger);
      for (auto s : smaller) block_of[s] = fresh;
      blocks.push_back(std::move(smaller));
      // `fresh` holds the smaller half, which is the right splitter whether or not
      // (b, c) is still pending.
      for (std::size_t c = 0; c < k; ++c) work.insert({fresh, c});
    }
  }

  // Keep blocks that are reachable from start and can reach an accepting block.
  const auto block_count = static_cast<std::uint32_t>(blocks.size());
  std::vector<std::vector<std::uint32_t>> forward(block_count), backward(block_count);
  for (std::uint32_t b = 0; b < block_count; ++b) {
    auto rep = blocks[b].front();
    for (std::size_t a = 0; a < k; ++a) {
      auto to = block_of[delta[rep * k + a]];
      forward[b].push_back(to);
      backward[to].push_back(b);
    }
  }
  auto flood = [&](std::vector<std::uint32_t> seeds, const auto& edges) {
    std::vector<bool> seen(block_count, false);
    for (auto s : seeds) seen[s] = true;
    while (!seeds.empty()) {
      auto b = seeds.back();
      seeds.pop_back();
      for (auto t : edges[b]) {
        if (!seen[t]) {
          seen[t] = true;
          seeds.push_back(t);
        }
      }
    }
    return seen;
  };
  std::vector<std::uint32_t> accepting_blocks;
  for (std::uint32_t b = 0; b < block_count; ++b) {
    auto rep = blocks[b].front();
    if (rep < n && dfa.finals[rep]) accepting_blocks.push_back(b);
  }
  const auto start_block = block_of[dfa.start];
  auto reachable = flood({start_block}, forward);
  auto live = flood(accepting_blocks, backward);

  Dfa out;
  std::vector<std::int64_t> new_id(block_count, -1);
  auto keep = [&](std::uint32_t b) { return reachable[b] && live[b]; };
  if (!keep(start_block)) {
    // empty language: a single rejecting start state
    out.start = 0;
    out.finals = {false};
    out.next.resize(1);
    return out;
  }
  for (std::uint32_t b = 0; b < block_count; ++b) {
    if (!keep(b)) continue;
    new_id[b] = static_cast<std::int64_t>(out.finals.size());
    auto rep = blocks[b].front();
    out.finals.push_back(rep < n && dfa.finals[rep]);
  }
  out.next.resize(out.finals.size());
  for (std::uint32_t b = 0; b < block_count; ++b) {
    if (!keep(b)) continue;
    auto rep = blocks[b].front();
    for (std::size_t a = 0; a < k; ++a) {
      auto to = block_of[delta[rep * k + a]];
      if (keep(to)) {
        out.next[static_cast<std::size_t>(new_id[b])][alphabet[a]] =
            static_cast<std::uint32_t>(new_id[to]);
      }
    }
  }
  out.start = static_cast<std::uint32_t>(new_id[start_block]);
  return out;
}

Dfa canonical_order(const Dfa& dfa, std::span<const std::string> terminal_order) {
  auto rank = [&](const Symbol& s) {
    auto it = std::find(terminal_order.begin(), terminal_order.end(), s.name);
    return std::tuple(s.is_terminal() ? 1 : 0,
                      s.is_terminal() ? it - terminal_order.begin() : std::ptrdiff_t{0}, s.name);
  };
  const auto n = dfa.state_count();
  std::vector<std::int64_t> id(n, -1);
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> stack{dfa.start};
  // iterative pre-order DFS
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    if (id[s] >= 0) continue;
    id[s] = static_cast<std::int64_t>(order.size());
    order.push_back(s);
    std::vector<std::pair<Symbol, std::uint32_t>> outs(dfa.next[s].begin(), dfa.next[s].end());
    std::sort(outs.begin(), outs.end(),
              [&](const auto& x, const auto& y) { return rank(x.first) < rank(y.first); });
    for (auto it = outs.rbegin(); it != outs.rend(); ++it) {
      if (id[it->second] < 0) stack.push_back(it->second);
    }
  }
  Dfa out;
  out.start = 0;
  out.finals.resize(order.size());
  out.next.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.finals[i] = dfa.finals[order[i]];
    for (const auto& [sym, to] : dfa.next[order[i]]) {
      out.next[i][sym] = static_cast<std::uint32_t>(id[to]);
    }
  }
  return out;
}

Dfa regex_to_dfa(const Regex& r) {
  auto order = terminals_of(r);
  return canonical_order(minimize(determinize(thompson(r))), order);
}

bool isomorphic(const Dfa& a, const Dfa& b) {
  if (a.state_count() != b.state_count()) return false;
  if (a.state_count() == 0) return true;
  std::vector<std::int64_t> map(a.state_count(), -1);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> work{{a.start, b.start}};
  map[a.start] = b.start;
  while (!work.empty()) {
    auto [x, y] = work.back();
    work.pop_back();
    if (a.finals[x] != b.finals[y]) return false;
    if (a.next[x].size() != b.next[y].size()) return false;
    for (const auto& [sym, tx] : a.next[x]) {
      auto ty = b.step(y, sym);
      if (!ty) return false;
      if (map[tx] < 0) {
        map[tx] = *ty;
        work.push_back({tx, *ty});
      } else if (map[tx] != static_cast<std::int64_t>(*ty)) {
        return false;
      }
    }
  }
  std::set<std::int64_t> image(map.begin(), map.end());
  return !image.contains(-1) && image.size() == a.state_count();
}

}  // namespace cfpq
