#include "cfpq/results.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace cfpq {

std::vector<VertexPair> reachable_pairs(const QueryResult& qr) {
  std::vector<VertexPair> out;
  out.reserve(qr.accepted.size());
  for (const Accepted& a : qr.accepted) out.emplace_back(a.source, a.target);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Range root_range(const QueryResult& qr, VertexId source, VertexId target) {
  return Range::of({qr.rsm.entry(), source}, {qr.rsm.after_call(), target});
}

namespace {

bool has_derivation(const PathIndex& index, const Cell& cell) {
  auto entries = index.entries(cell);
  return std::any_of(entries.begin(), entries.end(),
                     [](const IndexEntry& e) { return e.kind != IndexEntry::Kind::Epsilon; });
}

}  // namespace

// ---------------------------------------------------------------------------
// SPPF

std::size_t Sppf::edge_count() const {
  std::size_t n = 0;
  for (const SppfNode& node : nodes) n += node.children.size();
  return n;
}

SppfNodeId SppfForest::add(SppfNode n) {
  nodes_.push_back(std::move(n));
  return static_cast<SppfNodeId>(nodes_.size() - 1);
}

SppfNodeId SppfForest::range_node(const Cell& cell, std::vector<SppfNodeId>& pending) {
  auto it = ranges_.find(cell);
  if (it != ranges_.end()) return it->second;
  SppfNodeId id = add({SppfNode::Kind::Range, cell, {}, 0, {}, {}});
  ranges_.emplace(cell, id);
  pending.push_back(id);
  return id;
}

void SppfForest::fill(SppfNodeId id, std::vector<SppfNodeId>& pending) {
  const Cell cell = nodes_[id].cell;
  const Rsm& m = qr_.rsm.machine();
  auto span = qr_.index.entries(cell);
  std::vector<IndexEntry> entries(span.begin(), span.end());
  std::sort(entries.begin(), entries.end());

  std::vector<SppfNodeId> children;
  for (const IndexEntry& e : entries) {
    switch (e.kind) {
      case IndexEntry::Kind::Epsilon:
        break;
      case IndexEntry::Kind::Terminal:
        children.push_back(add({SppfNode::Kind::Terminal, cell, LabelId{e.value}, 0, {}, {}}));
        break;
      case IndexEntry::Kind::Nonterminal: {
        const Box& b = m.box(e.value);
        const VertexId u = cell.from.vertex;
        const VertexId w = cell.to.vertex;
        std::vector<StateId> finals = b.finals;
        std::sort(finals.begin(), finals.end());
        std::vector<SppfNodeId> inner;
        for (StateId f : finals) {
          Cell c{{b.start, u}, {f, w}};
          if (has_derivation(qr_.index, c)) inner.push_back(range_node(c, pending));
        }
        Cell zero{{b.start, u}, {b.start, u}};
        if (u == w && qr_.index.contains(zero, IndexEntry::epsilon())) {
          inner.push_back(add({SppfNode::Kind::Epsilon, zero, {}, 0, {}, {}}));
        }
        SppfNodeId n = add({SppfNode::Kind::Nonterminal, cell, {}, e.value, {}, std::move(inner)});
        children.push_back(n);
        break;
      }
      case IndexEntry::Kind::Intermediate: {
        SppfNodeId left = range_node({cell.from, e.point}, pending);
        SppfNodeId right = range_node({e.point, cell.to}, pending);
        children.push_back(add({SppfNode::Kind::Intermediate, cell, {}, 0, e.point, {left, right}}));
        break;
      }
    }
  }
  nodes_[id].children = std::move(children);
}

SppfNodeId SppfForest::expand(const Range& root) {
  if (root.empty || !has_derivation(qr_.index, {root.from, root.to})) {
    throw NoDerivation("no derivation for the requested range");
  }
  std::vector<SppfNodeId> pending;
  SppfNodeId id = range_node({root.from, root.to}, pending);
  while (!pending.empty()) {
    SppfNodeId next = pending.back();
    pending.pop_back();
    fill(next, pending);
  }
  return id;
}

std::vector<SppfNodeId> SppfForest::range_nodes_from(SppfNodeId from) const {
  std::vector<SppfNodeId> out;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<SppfNodeId> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    SppfNodeId n = stack.back();
    stack.pop_back();
    if (nodes_[n].kind == SppfNode::Kind::Range) out.push_back(n);
    for (SppfNodeId c : nodes_[n].children) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return out;
}

Sppf SppfForest::take(SppfNodeId root) && { return Sppf{&qr_, std::move(nodes_), root}; }

Sppf build_sppf(const QueryResult& qr, const Range& root) {
  SppfForest forest(qr);
  SppfNodeId id = forest.expand(root);
  return std::move(forest).take(id);
}

// ---------------------------------------------------------------------------
// Path enumeration

namespace {

using Steps = std::vector<PathStep>;

class StepOrder {
 public:
  explicit StepOrder(const Graph& g) : label_rank_(g.label_count()), vertex_rank_(g.vertex_count()) {
    std::vector<std::uint32_t> ids(g.label_count());
    std::iota(ids.begin(), ids.end(), 0u);
    std::sort(ids.begin(), ids.end(),
              [&](auto a, auto b) { return g.label_name(LabelId{a}) < g.label_name(LabelId{b}); });
    for (std::uint32_t r = 0; r < ids.size(); ++r) label_rank_[ids[r]] = r;
    ids.resize(g.vertex_count());
    std::iota(ids.begin(), ids.end(), 0u);
    std::sort(ids.begin(), ids.end(),
              [&](auto a, auto b) { return g.vertex_name(VertexId{a}) < g.vertex_name(VertexId{b}); });
    for (std::uint32_t r = 0; r < ids.size(); ++r) vertex_rank_[ids[r]] = r;
  }

  // Word first, then visited vertices. Compatible with concatenation of
  // equal-length prefixes, which keeps per-cell truncation exact.
  bool operator()(const Steps& a, const Steps& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto la = label_rank_[a[i].label.value], lb = label_rank_[b[i].label.value];
      if (la != lb) return la < lb;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto va = vertex_rank_[a[i].target.value], vb = vertex_rank_[b[i].target.value];
      if (va != vb) return va < vb;
    }
    return false;
  }

 private:
  std::vector<std::uint32_t> label_rank_;
  std::vector<std::uint32_t> vertex_rank_;
};

using StepSet = std::set<Steps, StepOrder>;

class Enumerator {
 public:
  Enumerator(const SppfForest& forest, std::vector<SppfNodeId> ranges, std::size_t cap,
             const StepOrder& order)
      : forest_(forest), ranges_(std::move(ranges)), cap_(cap), order_(order) {
    for (std::size_t i = 0; i < ranges_.size(); ++i) slot_[ranges_[i]] = i;
  }

  // Computes every range node's paths of exactly `length` edges.
  void advance(std::size_t length) {
    for (auto& per_length : table_) per_length.emplace_back(order_);
    if (table_.empty()) table_.assign(ranges_.size(), {StepSet(order_)});
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < ranges_.size(); ++i) {
        StepSet next(order_);
        for (SppfNodeId c : forest_.node(ranges_[i]).children) collect(c, length, next);
        if (!std::equal(next.begin(), next.end(), table_[i][length].begin(), table_[i][length].end())) {
          table_[i][length] = std::move(next);
          changed = true;
        }
      }
    }
  }

  const StepSet& paths(SppfNodeId range, std::size_t length) const {
    return table_[slot_.at(range)][length];
  }

 private:
  void insert(StepSet& into, Steps s) const {
    into.insert(std::move(s));
    if (into.size() > cap_) into.erase(std::prev(into.end()));
  }

  void collect(SppfNodeId id, std::size_t length, StepSet& into) const {
    const SppfNode& n = forest_.node(id);
    switch (n.kind) {
      case SppfNode::Kind::Range:
        for (const Steps& s : paths(id, length)) insert(into, s);
        break;
      case SppfNode::Kind::Epsilon:
        if (length == 0) insert(into, {});
        break;
      case SppfNode::Kind::Terminal:
        if (length == 1) insert(into, {PathStep{n.label, n.cell.to.vertex}});
        break;
      case SppfNode::Kind::Nonterminal:
        for (SppfNodeId c : n.children) collect(c, length, into);
        break;
      case SppfNode::Kind::Intermediate:
        for (std::size_t left = 0; left <= length; ++left) {
          const StepSet& a = paths(n.children[0], left);
          const StepSet& b = paths(n.children[1], length - left);
          for (const Steps& x : a) {
            for (const Steps& y : b) {
              Steps s = x;
              s.insert(s.end(), y.begin(), y.end());
              insert(into, std::move(s));
            }
          }
        }
        break;
    }
  }

  const SppfForest& forest_;
  std::vector<SppfNodeId> ranges_;
  std::unordered_map<SppfNodeId, std::size_t> slot_;
  std::size_t cap_;
  const StepOrder& order_;
  std::vector<std::vector<StepSet>> table_;  // [range slot][length]
};

}  // namespace

std::vector<Path> enumerate_paths(const QueryResult& qr, VertexId source, VertexId target,
                                  PathLimits limits) {
  std::vector<Path> out;
  if (limits.max_paths == 0) return out;
  const Range root = root_range(qr, source, target);
  if (!has_derivation(qr.index, {root.from, root.to})) return out;

  SppfForest forest(qr);
  SppfNodeId root_id = forest.expand(root);
  StepOrder order(*qr.graph);
  Enumerator en(forest, forest.range_nodes_from(root_id), limits.max_paths, order);
  for (std::size_t length = 0; length <= limits.max_length && out.size() < limits.max_paths; ++length) {
    en.advance(length);
    for (const Steps& s : en.paths(root_id, length)) {
      if (out.size() >= limits.max_paths) break;
      Path p{source, s};
      word_of_path(*qr.graph, p);  // throws InvalidPath if an edge is missing
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string point_id(const Point& p) {
  return "q" + std::to_string(p.state.value) + "_v" + std::to_string(p.vertex.value);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string sppf_to_dot(const Sppf& s) {
  const QueryResult& qr = *s.source;
  const Graph& g = *qr.graph;
  const Rsm& m = qr.rsm.machine();

  std::vector<std::string> ids(s.nodes.size());
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const SppfNode& n = s.nodes[i];
    if (n.kind == SppfNode::Kind::Range) ids[i] = "R_" + point_id(n.cell.from) + "__" + point_id(n.cell.to);
  }
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const SppfNode& parent = s.nodes[i];
    for (SppfNodeId c : parent.children) {
      const SppfNode& n = s.nodes[c];
      switch (n.kind) {
        case SppfNode::Kind::Range:
          break;
        case SppfNode::Kind::Terminal:
          ids[c] = "T" + std::to_string(n.label.value) + "_" + ids[i];
          break;
        case SppfNode::Kind::Nonterminal:
          ids[c] = "N" + std::to_string(n.box) + "_" + ids[i];
          break;
        case SppfNode::Kind::Intermediate:
          ids[c] = "I_" + point_id(n.point) + "_" + ids[i];
          break;
        case SppfNode::Kind::Epsilon:
          ids[c] = "E_" + ids[i];
          break;
      }
    }
  }

  auto range_label = [&](const Cell& c) {
    return "R(" + point_text(c.from, g, m) + "; " + point_text(c.to, g, m) + ")";
  };

  std::ostringstream out;
  out << "digraph sppf {\n";
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const SppfNode& n = s.nodes[i];
    out << "  " << ids[i] << " [";
    switch (n.kind) {
      case SppfNode::Kind::Range:
        out << "shape=box, label=" << quote(range_label(n.cell));
        break;
      case SppfNode::Kind::Terminal:
        out << "shape=plaintext, label=" << quote(g.label_name(n.label));
        break;
      case SppfNode::Kind::Nonterminal:
        out << "shape=ellipse, label=" << quote(m.box(n.box).nonterminal);
        break;
      case SppfNode::Kind::Intermediate:
        out << "shape=diamond, label=" << quote("I(" + point_text(n.point, g, m) + ")");
        break;
      case SppfNode::Kind::Epsilon:
        out << "shape=circle, label=\"eps\"";
        break;
    }
    if (i == s.root) out << ", peripheries=2";
    out << "];\n";
  }
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    for (SppfNodeId c : s.nodes[i].children) out << "  " << ids[i] << " -> " << ids[c] << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::vector<VertexPair> sort_by_name(const Graph& g, std::vector<VertexPair> pairs) {
  std::sort(pairs.begin(), pairs.end(), [&](const VertexPair& a, const VertexPair& b) {
    const auto& as = g.vertex_name(a.first);
    const auto& bs = g.vertex_name(b.first);
    if (as != bs) return as < bs;
    return g.vertex_name(a.second) < g.vertex_name(b.second);
  });
  return pairs;
}

void write_pairs_csv(std::ostream& out, const Graph& g, std::span<const VertexPair> pairs) {
  for (const VertexPair& p : sort_by_name(g, {pairs.begin(), pairs.end()})) {
    out << g.vertex_name(p.first) << ',' << g.vertex_name(p.second) << '\n';
  }
}

}  // namespace cfpq
