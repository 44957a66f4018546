#include "cfpq/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace cfpq {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

std::uint32_t InternTable::intern(std::string_view name) {
  std::string key(name);
  auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(names_.size()));
  if (inserted) names_.push_back(std::move(key));
  return it->second;
}

std::optional<std::uint32_t> InternTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

VertexId Graph::Builder::vertex(std::string_view name) {
  return VertexId{graph_.vertices_.intern(name)};
}

LabelId Graph::Builder::label(std::string_view name) {
  return LabelId{graph_.labels_.intern(name)};
}

Graph::Builder& Graph::Builder::edge(std::string_view source, std::string_view label_name,
                                     std::string_view target) {
  VertexId s = vertex(source);
  VertexId t = vertex(target);
  LabelId l = label(label_name);
  graph_.edges_.push_back({s, l, t});
  return *this;
}

Graph Graph::Builder::build() && {
  if (options_.add_inverse) {
    const std::size_t original = graph_.edges_.size();
    for (std::size_t i = 0; i < original; ++i) {
      Edge e = graph_.edges_[i];
      std::string inverse = graph_.labels_.name(e.label.value) + options_.inverse_suffix;
      LabelId l{graph_.labels_.intern(inverse)};
      graph_.edges_.push_back({e.target, l, e.source});
    }
  }
  graph_.finalize();
  return std::move(graph_);
}

void Graph::finalize() {
  label_counts_.assign(labels_.size(), 0);
  for (const Edge& e : edges_) ++label_counts_[e.label.value];

  const std::size_t n = vertices_.size();
  offsets_.assign(n + 1, 0);
  for (const Edge& e : edges_) ++offsets_[e.source.value + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());

  std::vector<std::size_t> order(edges_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Edge& x = edges_[a];
    const Edge& y = edges_[b];
    return std::pair(x.source, x.label) < std::pair(y.source, y.label);
  });
  adj_labels_.resize(edges_.size());
  adj_targets_.resize(edges_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    adj_labels_[i] = edges_[order[i]].label;
    adj_targets_[i] = edges_[order[i]].target;
  }
}

std::span<const VertexId> Graph::outgoing(VertexId v, LabelId l) const {
  if (v.value >= vertex_count()) return {};
  auto first = adj_labels_.begin() + static_cast<std::ptrdiff_t>(offsets_[v.value]);
  auto last = adj_labels_.begin() + static_cast<std::ptrdiff_t>(offsets_[v.value + 1]);
  auto [lo, hi] = std::equal_range(first, last, l);
  auto begin = static_cast<std::size_t>(lo - adj_labels_.begin());
  auto count = static_cast<std::size_t>(hi - lo);
  return std::span<const VertexId>(adj_targets_).subspan(begin, count);
}

bool Graph::has_edge(VertexId source, LabelId label, VertexId target) const {
  auto targets = outgoing(source, label);
  return std::find(targets.begin(), targets.end(), target) != targets.end();
}

std::optional<VertexId> Graph::find_vertex(std::string_view name) const {
  if (auto id = vertices_.find(name)) return VertexId{*id};
  return std::nullopt;
}

std::optional<LabelId> Graph::find_label(std::string_view name) const {
  if (auto id = labels_.find(name)) return LabelId{*id};
  return std::nullopt;
}

GraphStats Graph::stats() const {
  GraphStats s;
  s.vertex_count = vertex_count();
  s.edge_count = edge_count();
  for (std::uint32_t i = 0; i < labels_.size(); ++i) {
    s.per_label.push_back({LabelId{i}, labels_.name(i), label_counts_[i]});
  }
  return s;
}

void Graph::write_edge_list(std::ostream& out) const {
  for (const Edge& e : edges_) {
    out << vertex_name(e.source) << ' ' << label_name(e.label) << ' ' << vertex_name(e.target)
        << '\n';
  }
}

Graph Graph::load_edge_list(std::istream& in, const EdgeListOptions& options) {
  Builder builder(options);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<std::string> parts;
    for (std::string tok; tokens >> tok;) parts.push_back(std::move(tok));
    if (parts.empty() || parts.front().starts_with('#')) continue;
    if (parts.size() != 3) {
      throw ParseError(line_no, 1,
                       "expected `source label target`, got " + std::to_string(parts.size()) +
                           " tokens");
    }
    builder.edge(parts[0], parts[1], parts[2]);
  }
  return std::move(builder).build();
}

Graph Graph::load_edge_list_file(const std::string& path, const EdgeListOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return load_edge_list(in, options);
}

Graph Graph::from_text(std::string_view text, const EdgeListOptions& options) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in, options);
}

std::vector<LabelId> word_of_path(const Graph& g, const Path& p) {
  if (p.start.value >= g.vertex_count()) throw InvalidPath("path starts outside the graph");
  std::vector<LabelId> word;
  word.reserve(p.steps.size());
  VertexId at = p.start;
  for (const PathStep& step : p.steps) {
    if (!g.has_edge(at, step.label, step.target)) {
      throw InvalidPath("no edge " + std::to_string(at.value) + " -" +
                        std::to_string(step.label.value) + "-> " +
                        std::to_string(step.target.value));
    }
    word.push_back(step.label);
    at = step.target;
  }
  return word;
}

std::vector<std::string> word_names(const Graph& g, const Path& p) {
  std::vector<std::string> out;
  for (LabelId l : word_of_path(g, p)) out.push_back(g.label_name(l));
  return out;
}

std::string format_path(const Graph& g, const Path& p) {
  std::string out = g.vertex_name(p.start);
  for (const PathStep& step : p.steps) {
    out += " -";
    out += g.label_name(step.label);
    out += "-> ";
    out += g.vertex_name(step.target);
  }
  return out;
}

}  // namespace cfpq
