#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include "cfpq/grammar.hpp"

namespace cfpq {

// ---------------------------------------------------------------------------
// EBNF -> BNF

namespace {

class BnfLowering {
 public:
  explicit BnfLowering(BnfGrammar& out) : out_(out) {}

  void lower(const EbnfProduction& p) {
    lhs_ = p.lhs;
    counter_ = 0;
    if (p.rhs.kind == Regex::Kind::Union) {
      for (const Regex& branch : p.rhs.children) out_.productions.push_back({lhs_, flatten(branch)});
    } else {
      out_.productions.push_back({lhs_, flatten(p.rhs)});
    }
  }

 private:
  std::string fresh() { return lhs_ + "#" + std::to_string(counter_++); }

  // Sequence of symbols equivalent to `r`; nested operators become fresh nonterminals.
  std::vector<Symbol> flatten(const Regex& r) {
    switch (r.kind) {
      case Regex::Kind::Epsilon:
        return {};
      case Regex::Kind::Sym:
        return {r.symbol};
      case Regex::Kind::Concat: {
        std::vector<Symbol> seq;
        for (const Regex& c : r.children) {
          auto part = flatten(c);
          seq.insert(seq.end(), part.begin(), part.end());
        }
        return seq;
      }
      case Regex::Kind::Union: {
        std::string x = fresh();
        for (const Regex& c : r.children) emit(x, flatten(c));
        return {Symbol::nonterminal(x)};
      }
      case Regex::Kind::Star: {
        // X -> eps | E X
        std::string x = fresh();
        auto body = flatten(r.children.front());
        emit(x, {});
        body.push_back(Symbol::nonterminal(x));
        emit(x, std::move(body));
        return {Symbol::nonterminal(x)};
      }
      case Regex::Kind::Plus: {
        // X -> E | E X
        std::string x = fresh();
        auto body = flatten(r.children.front());
        emit(x, body);
        body.push_back(Symbol::nonterminal(x));
        emit(x, std::move(body));
        return {Symbol::nonterminal(x)};
      }
      case Regex::Kind::Optional: {
        // X -> eps | E
        std::string x = fresh();
        auto body = flatten(r.children.front());
        emit(x, {});
        emit(x, std::move(body));
        return {Symbol::nonterminal(x)};
      }
    }
    return {};
  }

  void emit(const std::string& lhs, std::vector<Symbol> rhs) {
    out_.productions.push_back({lhs, std::move(rhs)});
  }

  BnfGrammar& out_;
  std::string lhs_;
  int counter_ = 0;
};

}  // namespace

BnfGrammar ebnf_to_bnf(const EbnfGrammar& g) {
  BnfGrammar out;
  out.start = g.start;
  BnfLowering lowering(out);
  for (const auto& p : g.productions) lowering.lower(p);
  // keep each nonterminal's productions contiguous, declaration order otherwise
  std::stable_sort(out.productions.begin(), out.productions.end(),
                   [order = out.nonterminals()](const BnfProduction& a, const BnfProduction& b) {
                     auto rank = [&](const std::string& n) {
                       return std::find(order.begin(), order.end(), n) - order.begin();
                     };
                     return rank(a.lhs) < rank(b.lhs);
                   });
  return out;
}

// ---------------------------------------------------------------------------
// BNF -> CNF

namespace {

struct Item {
  bool terminal;
  std::uint32_t nt;  // nonterminal index when !terminal
  std::string t;     // terminal name when terminal

  friend bool operator<(const Item& a, const Item& b) {
    return std::tie(a.terminal, a.nt, a.t) < std::tie(b.terminal, b.nt, b.t);
  }
  friend bool operator==(const Item& a, const Item& b) {
    return a.terminal == b.terminal && a.nt == b.nt && a.t == b.t;
  }
};

using Rule = std::pair<std::uint32_t, std::vector<Item>>;

class CnfBuilder {
 public:
  explicit CnfBuilder(const BnfGrammar& g) {
    for (const auto& p : g.productions) id(p.lhs);
    start_ = id(g.start);
    for (const auto& p : g.productions) {
      std::vector<Item> rhs;
      for (const Symbol& s : p.rhs) {
        if (s.is_terminal()) {
          rhs.push_back({true, 0, s.name});
        } else {
          rhs.push_back({false, id(s.name), {}});
        }
      }
      rules_.push_back({id(p.lhs), std::move(rhs)});
    }
  }

  CnfGrammar run() {
    drop_unproductive();
    CnfGrammar out;
    if (!productive_.contains(start_)) {
      out.nonterminals = {names_[start_]};
      out.start = 0;
      return out;
    }
    add_fresh_start();
    lift_terminals();
    binarize();
    eliminate_epsilon();
    eliminate_units();
    return emit();
  }

 private:
  std::uint32_t id(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  std::uint32_t fresh(const std::string& base) {
    std::string name = base;
    for (int k = 0; ids_.contains(name); ++k) name = base + "'" + std::to_string(k);
    return id(name);
  }

  void drop_unproductive() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [lhs, rhs] : rules_) {
        if (productive_.contains(lhs)) continue;
        bool ok = std::all_of(rhs.begin(), rhs.end(), [&](const Item& it) {
          return it.terminal || productive_.contains(it.nt);
        });
        if (ok) {
          productive_.insert(lhs);
          changed = true;
        }
      }
    }
    std::erase_if(rules_, [&](const Rule& r) {
      if (!productive_.contains(r.first)) return true;
      return std::any_of(r.second.begin(), r.second.end(),
                         [&](const Item& it) { return !it.terminal && !productive_.contains(it.nt); });
    });
  }

  void add_fresh_start() {
    std::uint32_t s0 = fresh(names_[start_] + "#start");
    rules_.push_back({s0, {Item{false, start_, {}}}});
    start_ = s0;
  }

  void lift_terminals() {
    std::map<std::string, std::uint32_t> lifted;
    std::vector<Rule> extra;
    for (auto& [lhs, rhs] : rules_) {
      if (rhs.size() < 2) continue;
      for (Item& it : rhs) {
        if (!it.terminal) continue;
        auto [pos, inserted] = lifted.try_emplace(it.t, 0);
        if (inserted) {
          pos->second = fresh("T#" + it.t);
          extra.push_back({pos->second, {Item{true, 0, it.t}}});
        }
        it = Item{false, pos->second, {}};
      }
    }
    rules_.insert(rules_.end(), extra.begin(), extra.end());
  }

  void binarize() {
    std::vector<Rule> out;
    for (auto& [lhs, rhs] : rules_) {
      if (rhs.size() <= 2) {
        out.push_back({lhs, rhs});
        continue;
      }
      std::uint32_t current = lhs;
      for (std::size_t i = 0; i + 2 < rhs.size(); ++i) {
        std::uint32_t next = fresh(names_[lhs] + "#bin");
        out.push_back({current, {rhs[i], Item{false, next, {}}}});
        current = next;
      }
      out.push_back({current, {rhs[rhs.size() - 2], rhs.back()}});
    }
    rules_ = std::move(out);
  }

  void eliminate_epsilon() {
    std::set<std::uint32_t> nullable;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [lhs, rhs] : rules_) {
        if (nullable.contains(lhs)) continue;
        bool all = std::all_of(rhs.begin(), rhs.end(),
                               [&](const Item& it) { return !it.terminal && nullable.contains(it.nt); });
        if (all) {
          nullable.insert(lhs);
          changed = true;
        }
      }
    }
    start_nullable_ = nullable.contains(start_);
    std::set<Rule> out;
    for (const auto& [lhs, rhs] : rules_) {
      if (rhs.empty()) continue;
      out.insert({lhs, rhs});
      if (rhs.size() == 2) {
        auto null = [&](const Item& it) { return !it.terminal && nullable.contains(it.nt); };
        if (null(rhs[0])) out.insert({lhs, {rhs[1]}});
        if (null(rhs[1])) out.insert({lhs, {rhs[0]}});
      }
    }
    rules_.assign(out.begin(), out.end());
  }

  void eliminate_units() {
    const auto n = static_cast<std::uint32_t>(names_.size());
    // reach[a] = nonterminals b with a =>* b through unit rules
    std::vector<std::set<std::uint32_t>> reach(n);
    for (std::uint32_t a = 0; a < n; ++a) reach[a].insert(a);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [lhs, rhs] : rules_) {
        if (rhs.size() != 1 || rhs[0].terminal) continue;
        for (std::uint32_t a = 0; a < n; ++a) {
          if (!reach[a].contains(lhs)) continue;
          for (std::uint32_t b : std::set<std::uint32_t>(reach[rhs[0].nt])) {
            if (reach[a].insert(b).second) changed = true;
          }
        }
      }
    }
    std::set<Rule> out;
    for (std::uint32_t a = 0; a < n; ++a) {
      for (const auto& [lhs, rhs] : rules_) {
        if (!reach[a].contains(lhs)) continue;
        if (rhs.size() == 1 && !rhs[0].terminal) continue;
        out.insert({a, rhs});
      }
    }
    rules_.assign(out.begin(), out.end());
  }

  CnfGrammar emit() {
    CnfGrammar out;
    out.nonterminals = names_;
    out.start = start_;
    out.start_nullable = start_nullable_;
    for (const auto& [lhs, rhs] : rules_) {
      if (rhs.size() == 1) {
        out.terminal.push_back({lhs, rhs[0].t});
      } else {
        out.binary.push_back({lhs, rhs[0].nt, rhs[1].nt});
      }
    }
    return out;
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<Rule> rules_;
  std::set<std::uint32_t> productive_;
  std::uint32_t start_ = 0;
  bool start_nullable_ = false;
};

}  // namespace

CnfGrammar to_cnf(const BnfGrammar& g) { return CnfBuilder(g).run(); }

}  // namespace cfpq
