#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfpq/ids.hpp"

namespace cfpq {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class InvalidPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  VertexId source;
  LabelId label;
  VertexId target;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct PathStep {
  LabelId label;
  VertexId target;

  friend bool operator==(const PathStep&, const PathStep&) = default;
  friend auto operator<=>(const PathStep&, const PathStep&) = default;
};

// A walk through the graph; an empty step list is the zero-length path at `start`.
struct Path {
  VertexId start;
  std::vector<PathStep> steps;

  VertexId end() const { return steps.empty() ? start : steps.back().target; }
  std::size_t length() const { return steps.size(); }

  friend bool operator==(const Path&, const Path&) = default;
  friend auto operator<=>(const Path&, const Path&) = default;
};

struct EdgeListOptions {
  bool add_inverse = false;
  std::string inverse_suffix = "_r";
};

struct LabelCount {
  LabelId label;
  std::string name;
  std::size_t edges;
};

struct GraphStats {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::vector<LabelCount> per_label;  // ordered by LabelId
};

/// String intern table: names map to dense ids in first-appearance order.
class InternTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Immutable edge-labelled directed multigraph.
///
/// Outgoing edges are kept in CSR form grouped by source and then by label, so
/// `outgoing(v, l)` is a binary search plus a contiguous span.
class Graph {
 public:
  Graph() = default;

  static Graph load_edge_list(std::istream& in, const EdgeListOptions& options = {});
  static Graph load_edge_list_file(const std::string& path, const EdgeListOptions& options = {});
  static Graph from_text(std::string_view text, const EdgeListOptions& options = {});

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t label_count() const { return labels_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const VertexId> outgoing(VertexId v, LabelId l) const;
  bool has_edge(VertexId source, LabelId label, VertexId target) const;

  std::optional<VertexId> find_vertex(std::string_view name) const;
  std::optional<LabelId> find_label(std::string_view name) const;
  const std::string& vertex_name(VertexId v) const { return vertices_.name(v.value); }
  const std::string& label_name(LabelId l) const { return labels_.name(l.value); }

  std::size_t label_edge_count(LabelId l) const { return label_counts_.at(l.value); }
  GraphStats stats() const;

  /// Writes `source label target` lines in edge insertion order.
  void write_edge_list(std::ostream& out) const;

  class Builder;

 private:
  void finalize();

  InternTable vertices_;
  InternTable labels_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> label_counts_;

  // CSR adjacency sorted by (label, target-insertion order) within a source
  std::vector<std::size_t> offsets_;
  std::vector<LabelId> adj_labels_;
  std::vector<VertexId> adj_targets_;
};

class Graph::Builder {
 public:
  explicit Builder(EdgeListOptions options = {}) : options_(std::move(options)) {}

  VertexId vertex(std::string_view name);
  LabelId label(std::string_view name);
  Builder& edge(std::string_view source, std::string_view label, std::string_view target);
  Graph build() &&;

 private:
  EdgeListOptions options_;
  Graph graph_;
};

std::vector<LabelId> word_of_path(const Graph& g, const Path& p);
std::vector<std::string> word_names(const Graph& g, const Path& p);

/// Renders `v0 -a-> v0 -b-> v1` using original vertex and label names.
std::string format_path(const Graph& g, const Path& p);

}  // namespace cfpq
