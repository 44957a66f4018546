#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfpq/gll.hpp"

namespace cfpq {

class NoDerivation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VertexPair = std::pair<VertexId, VertexId>;

/// Accepted (source, target) pairs, sorted by id, without duplicates.
std::vector<VertexPair> reachable_pairs(const QueryResult& qr);

/// Root range of the derivation for (source, target) in the extended start box.
Range root_range(const QueryResult& qr, VertexId source, VertexId target);

using SppfNodeId = std::uint32_t;

struct SppfNode {
  enum class Kind : std::uint8_t { Range, Terminal, Nonterminal, Intermediate, Epsilon };

  Kind kind;
  // Range: its own cell. Other kinds: the cell of the range node owning them,
  // except Epsilon, which carries the callee's zero-length cell.
  Cell cell;
  LabelId label;            // Terminal
  std::uint32_t box = 0;    // Nonterminal
  Point point;              // Intermediate
  std::vector<SppfNodeId> children;
};

/// Shared packed parse forest. Range nodes are unique per cell; other nodes
/// hang off exactly one range node. The node graph may contain cycles.
struct Sppf {
  const QueryResult* source = nullptr;
  std::vector<SppfNode> nodes;
  SppfNodeId root = 0;

  std::size_t edge_count() const;
  const SppfNode& node(SppfNodeId id) const { return nodes.at(id); }
};

/// Expands range nodes on demand and keeps them memoized across roots.
class SppfForest {
 public:
  explicit SppfForest(const QueryResult& qr) : qr_(qr) {}

  /// Throws NoDerivation when the cell of `root` is empty.
  SppfNodeId expand(const Range& root);

  const SppfNode& node(SppfNodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  /// Range node ids reachable from `from`, in discovery order.
  std::vector<SppfNodeId> range_nodes_from(SppfNodeId from) const;

  Sppf take(SppfNodeId root) &&;

 private:
  SppfNodeId range_node(const Cell& cell, std::vector<SppfNodeId>& pending);
  void fill(SppfNodeId id, std::vector<SppfNodeId>& pending);
  SppfNodeId add(SppfNode n);

  const QueryResult& qr_;
  std::vector<SppfNode> nodes_;
  std::unordered_map<Cell, SppfNodeId, CellHash> ranges_;
};

Sppf build_sppf(const QueryResult& qr, const Range& root);

struct PathLimits {
  std::size_t max_paths = 10;
  std::size_t max_length = 10;
};

/// Distinct paths from `source` to `target` whose words are in the language,
/// shortest first; equal lengths ordered by word (label names), then by the
/// names of the visited vertices.
std::vector<Path> enumerate_paths(const QueryResult& qr, VertexId source, VertexId target,
                                  PathLimits limits = {});

/// Graphviz text. Node ids are derived from range endpoints and entries, so
/// rendering is reproducible across runs.
std::string sppf_to_dot(const Sppf& s);

/// `source,target` lines using vertex names, sorted by (source name, target name).
void write_pairs_csv(std::ostream& out, const Graph& g, std::span<const VertexPair> pairs);
std::vector<VertexPair> sort_by_name(const Graph& g, std::vector<VertexPair> pairs);

}  // namespace cfpq
