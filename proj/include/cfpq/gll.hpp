#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cfpq/graph.hpp"
#include "cfpq/path_index.hpp"
#include "cfpq/rsm.hpp"

namespace cfpq {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using GssNodeRef = std::uint32_t;

struct Descriptor {
  StateId state;
  VertexId vertex;
  GssNodeRef gss = 0;
  Range range;

  friend constexpr auto operator<=>(const Descriptor&, const Descriptor&) = default;
};

struct DescriptorHash {
  std::size_t operator()(const Descriptor& d) const noexcept {
    std::size_t h = hash_mix(hash_value(d.range), pack(d.state.value, d.vertex.value));
    return hash_mix(h, d.gss);
  }
};

struct GssEdge {
  StateId return_state;
  Range caller_range;
  StateId call_state;  // source of the call transition; locates the Nonterminal cell
  GssNodeRef target;

  friend constexpr auto operator<=>(const GssEdge&, const GssEdge&) = default;
};

struct GssEdgeHash {
  std::size_t operator()(const GssEdge& e) const noexcept {
    return hash_mix(hash_value(e.caller_range), pack(e.return_state.value, e.call_state.value) ^
                                                    (static_cast<std::uint64_t>(e.target) << 17));
  }
};

struct GssNode {
  StateId callee_start;
  VertexId vertex;
  std::vector<GssEdge> edges;
  std::vector<Range> stored_pops;
};

enum class QueueOrder : std::uint8_t { Fifo, Lifo };

struct TraceEvent {
  enum class Kind : std::uint8_t { Processed, Added, Rejected };
  Kind kind;
  Descriptor descriptor;
};

struct EngineOptions {
  QueueOrder order = QueueOrder::Fifo;
  bool record_trace = false;
  /// Keeps a separate handled set and counts descriptors processed more than once.
  bool audit_handled = false;
  /// Invoked as soon as a pair is accepted (source, target).
  std::function<void(VertexId, VertexId)> on_accept;
};

struct Accepted {
  VertexId source;
  VertexId target;
  Range root;

  friend constexpr auto operator<=>(const Accepted&, const Accepted&) = default;
};

struct Diagnostics {
  std::size_t descriptor_count = 0;
  std::size_t gss_node_count = 0;
  std::size_t gss_edge_count = 0;
  std::size_t rejected_descriptors = 0;
  std::size_t reprocessed_descriptors = 0;  // only counted with audit_handled
};

/// Everything a finished query leaves behind. Holds its own copy of the machine;
/// the graph is referenced and must outlive the result.
struct QueryResult {
  ExtendedRsm rsm;
  const Graph* graph = nullptr;
  PathIndex index;
  std::vector<Accepted> accepted;
  Diagnostics diagnostics;
  std::vector<TraceEvent> trace;
};

/// GLL descriptor loop over an extended RSM and a graph.
///
/// One instance evaluates one multiple-source query. `initialize` seeds the
/// queue; `run` drains it. The individual step functions are public so the
/// worked example can be replayed row by row.
class Engine {
 public:
  Engine(const ExtendedRsm& rsm, const Graph& graph, EngineOptions options = {});

  void initialize(std::span<const VertexId> starts);

  /// Enqueues `d` unless it was already queued or handled.
  bool add_descriptor(const Descriptor& d);

  std::vector<Descriptor> step_terminal(const Descriptor& d);
  std::vector<Descriptor> step_nonterminal(const Descriptor& d);
  std::vector<Descriptor> step_final(const Descriptor& d);

  /// Handles `d`: acceptance check plus every applicable step case.
  void process(const Descriptor& d);
  /// Processes the next queued descriptor; false when the queue is empty.
  bool step();
  QueryResult run();

  const PathIndex& index() const { return index_; }
  const GssNode& gss_node(GssNodeRef n) const { return gss_.at(n); }
  std::size_t gss_node_count() const { return gss_.size(); }
  std::optional<GssNodeRef> find_gss_node(StateId callee_start, VertexId v) const;
  std::size_t queue_size() const { return queue_.size(); }
  const std::vector<Accepted>& accepted() const { return accepted_; }
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  struct TerminalMove {
    LabelId label;
    StateId to;
  };
  struct CallMove {
    std::uint32_t box;
    StateId callee_start;
    StateId to;
  };

  GssNodeRef node_for(StateId callee_start, VertexId v);
  Descriptor pop_along(const GssEdge& e, VertexId w0, std::uint32_t callee_box, const Range& pop);
  void write(const Point& from, const Point& to, const IndexEntry& e) { index_.add({from, to}, e); }

  const ExtendedRsm& rsm_;
  const Graph& graph_;
  EngineOptions options_;

  std::vector<std::vector<TerminalMove>> terminal_moves_;
  std::vector<std::vector<CallMove>> call_moves_;
  std::vector<std::uint32_t> box_of_;
  std::vector<bool> final_;

  std::vector<GssNode> gss_;
  std::unordered_map<std::uint64_t, GssNodeRef> gss_ids_;
  std::vector<std::unordered_set<GssEdge, GssEdgeHash>> gss_edge_sets_;
  std::vector<std::unordered_set<Range, RangeHash>> pop_sets_;

  std::deque<Descriptor> queue_;
  std::unordered_set<Descriptor, DescriptorHash> seen_;
  std::unordered_set<Descriptor, DescriptorHash> handled_;

  PathIndex index_;
  std::vector<Accepted> accepted_;
  Diagnostics diag_;
  std::vector<TraceEvent> trace_;
};

QueryResult run_query(const ExtendedRsm& rsm, const Graph& graph, std::span<const VertexId> starts,
                      EngineOptions options = {});

/// Regular path query through the same engine, as the grammar `S -> regex`.
QueryResult run_rpq(const Regex& regex, const Graph& graph, std::span<const VertexId> starts,
                    EngineOptions options = {});

/// Human-readable index entry: `a`, `S`, `eps`, `I_{q1,v0}`.
std::string entry_text(const IndexEntry& e, const Graph& g, const Rsm& rsm);
std::string point_text(const Point& p, const Graph& g, const Rsm& rsm);

}  // namespace cfpq
