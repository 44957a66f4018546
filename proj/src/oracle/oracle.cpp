#include "cfpq/oracle/oracle.hpp"

#include <deque>
#include <tuple>
#include <unordered_map>

namespace cfpq::oracle {

bool cyk_membership(const Word& word, const CnfGrammar& g) {
  const std::size_t n = word.size();
  if (n == 0) return g.start_nullable;
  const std::size_t k = g.nonterminals.size();
  // derives[i][len-1][A]: A =>* word[i .. i+len)
  std::vector<std::vector<std::vector<char>>> derives(
      n, std::vector<std::vector<char>>(n, std::vector<char>(k, 0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& r : g.terminal) {
      if (r.terminal == word[i]) derives[i][0][r.lhs] = 1;
    }
  }
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      for (std::size_t split = 1; split < len; ++split) {
        const auto& left = derives[i][split - 1];
        const auto& right = derives[i + split][len - split - 1];
        for (const auto& r : g.binary) {
          if (left[r.left] && right[r.right]) derives[i][len - 1][r.lhs] = 1;
        }
      }
    }
  }
  return derives[0][n - 1][g.start] != 0;
}

bool cyk_membership(const Graph& graph, const Path& p, const CnfGrammar& g) {
  return cyk_membership(word_names(graph, p), g);
}

void for_each_path_bounded(const Graph& g, VertexId source, std::size_t max_len,
                           const std::function<bool(const Path&)>& visit) {
  std::deque<Path> queue{Path{source, {}}};
  while (!queue.empty()) {
    Path p = std::move(queue.front());
    queue.pop_front();
    if (!visit(p)) return;
    if (p.length() == max_len) continue;
    for (const Edge& e : g.edges()) {
      if (e.source != p.end()) continue;
      Path next = p;
      next.steps.push_back({e.label, e.target});
      queue.push_back(std::move(next));
    }
  }
}

std::vector<Path> enumerate_paths_bounded(const Graph& g, VertexId source, std::size_t max_len) {
  std::vector<Path> out;
  for_each_path_bounded(g, source, max_len, [&](const Path& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

OracleReport cfpq_oracle(const Graph& g, const CnfGrammar& grammar, std::span<const VertexId> starts,
                         std::size_t max_len) {
  OracleReport report;
  report.bound = max_len;
  if (grammar.empty_language()) return report;
  std::map<Word, bool> member;
  auto accepted = [&](const Word& w) {
    auto [it, inserted] = member.try_emplace(w, false);
    if (inserted) it->second = cyk_membership(w, grammar);
    return it->second;
  };

  for (VertexId s : starts) {
    // all paths from s grouped by word; one (shortest, first found) path per end vertex
    std::map<Word, std::map<VertexId, Path>> level{{Word{}, {{s, Path{s, {}}}}}};
    for (std::size_t len = 0; len <= max_len && !level.empty(); ++len) {
      std::map<Word, std::map<VertexId, Path>> next;
      for (const auto& [word, ends] : level) {
        if (accepted(word)) {
          for (const auto& [v, path] : ends) {
            if (report.pairs.insert({s, v}).second) report.witness.emplace(Pair{s, v}, path);
          }
        }
        if (len == max_len) continue;
        for (const auto& [v, path] : ends) {
          for (const Edge& e : g.edges()) {
            if (e.source != v) continue;
            Word w = word;
            w.push_back(g.label_name(e.label));
            auto& slot = next[std::move(w)];
            if (!slot.contains(e.target)) {
              Path p = path;
              p.steps.push_back({e.label, e.target});
              slot.emplace(e.target, std::move(p));
            }
          }
        }
      }
      level = std::move(next);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

namespace {

struct Automaton {
  std::vector<std::vector<std::pair<std::string, int>>> moves;
  std::vector<std::vector<int>> eps;
  int start = 0;
  int accept = 0;

  int fresh() {
    moves.emplace_back();
    eps.emplace_back();
    return static_cast<int>(moves.size() - 1);
  }

  std::pair<int, int> build(const Regex& r) {
    int s = fresh();
    int e = fresh();
    switch (r.kind) {
      case Regex::Kind::Epsilon:
        eps[s].push_back(e);
        break;
      case Regex::Kind::Sym:
        moves[s].emplace_back(r.symbol.name, e);
        break;
      case Regex::Kind::Concat: {
        int at = s;
        for (const Regex& c : r.children) {
          auto [cs, ce] = build(c);
          eps[at].push_back(cs);
          at = ce;
        }
        eps[at].push_back(e);
        break;
      }
      case Regex::Kind::Union:
        for (const Regex& c : r.children) {
          auto [cs, ce] = build(c);
          eps[s].push_back(cs);
          eps[ce].push_back(e);
        }
        break;
      case Regex::Kind::Star:
      case Regex::Kind::Plus:
      case Regex::Kind::Optional: {
        auto [cs, ce] = build(r.children.front());
        eps[s].push_back(cs);
        eps[ce].push_back(e);
        if (r.kind != Regex::Kind::Plus) eps[s].push_back(e);
        if (r.kind != Regex::Kind::Optional) eps[ce].push_back(cs);
        break;
      }
    }
    return {s, e};
  }

  explicit Automaton(const Regex& r) { std::tie(start, accept) = build(r); }

  std::set<int> closure(std::set<int> states) const {
    std::vector<int> stack(states.begin(), states.end());
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int t : eps[q]) {
        if (states.insert(t).second) stack.push_back(t);
      }
    }
    return states;
  }
};

}  // namespace

std::set<Pair> rpq_oracle(const Graph& g, const Regex& regex, std::span<const VertexId> starts) {
  Automaton a(regex);
  std::set<Pair> out;
  for (VertexId s : starts) {
    std::set<std::pair<int, std::uint32_t>> seen;
    std::deque<std::pair<int, std::uint32_t>> queue;
    for (int q : a.closure({a.start})) {
      if (seen.insert({q, s.value}).second) queue.emplace_back(q, s.value);
    }
    while (!queue.empty()) {
      auto [q, v] = queue.front();
      queue.pop_front();
      if (q == a.accept) out.insert({s, VertexId{v}});
      for (const auto& [label, to] : a.moves[q]) {
        for (const Edge& e : g.edges()) {
          if (e.source.value != v || g.label_name(e.label) != label) continue;
          for (int t : a.closure({to})) {
            if (seen.insert({t, e.target.value}).second) queue.emplace_back(t, e.target.value);
          }
        }
      }
    }
  }
  return out;
}

bool regex_accepts(const Regex& regex, const Word& word) {
  Automaton a(regex);
  std::set<int> current = a.closure({a.start});
  for (const std::string& sym : word) {
    std::set<int> next;
    for (int q : current) {
      for (const auto& [label, to] : a.moves[q]) {
        if (label == sym) next.insert(to);
      }
    }
    current = a.closure(std::move(next));
  }
  return current.contains(a.accept);
}

std::set<Word> bnf_words_up_to(const BnfGrammar& g, std::size_t max_len) {
  std::unordered_map<std::string, std::set<Word>> words;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      std::set<Word> partial{Word{}};
      for (const Symbol& s : p.rhs) {
        std::set<Word> next;
        for (const Word& w : partial) {
          if (s.is_terminal()) {
            if (w.size() + 1 > max_len) continue;
            Word x = w;
            x.push_back(s.name);
            next.insert(std::move(x));
          } else {
            for (const Word& tail : words[s.name]) {
              if (w.size() + tail.size() > max_len) continue;
              Word x = w;
              x.insert(x.end(), tail.begin(), tail.end());
              next.insert(std::move(x));
            }
          }
        }
        partial = std::move(next);
      }
      auto& target = words[p.lhs];
      for (const Word& w : partial) changed |= target.insert(w).second;
    }
  }
  return words[g.start];
}

}  // namespace cfpq::oracle
