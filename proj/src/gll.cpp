#include "cfpq/gll.hpp"

#include <algorithm>

namespace cfpq {

Engine::Engine(const ExtendedRsm& rsm, const Graph& graph, EngineOptions options)
    : rsm_(rsm), graph_(graph), options_(std::move(options)) {
  const Rsm& m = rsm_.machine();
  const std::size_t capacity = m.state_capacity();
  terminal_moves_.resize(capacity);
  call_moves_.resize(capacity);
  box_of_.assign(capacity, 0);
  final_.assign(capacity, false);
  for (std::uint32_t i = 0; i < capacity; ++i) {
    StateId q{i};
    if (!m.contains(q)) continue;
    box_of_[i] = static_cast<std::uint32_t>(m.box_of(q));
    final_[i] = m.is_final(q);
    for (const RsmTransition& t : m.transitions_from(q)) {
      switch (t.label.kind) {
        case RsmLabel::Kind::Terminal:
          // labels absent from the graph can never fire
          if (auto l = graph_.find_label(t.label.name)) terminal_moves_[i].push_back({*l, t.to});
          break;
        case RsmLabel::Kind::Call: {
          auto b = *m.find_box(t.label.name);
          call_moves_[i].push_back({static_cast<std::uint32_t>(b), m.box(b).start, t.to});
          break;
        }
        case RsmLabel::Kind::EndMarker:
          break;
      }
    }
  }
}

std::optional<GssNodeRef> Engine::find_gss_node(StateId callee_start, VertexId v) const {
  auto it = gss_ids_.find(pack(callee_start.value, v.value));
  if (it == gss_ids_.end()) return std::nullopt;
  return it->second;
}

GssNodeRef Engine::node_for(StateId callee_start, VertexId v) {
  auto [it, inserted] =
      gss_ids_.try_emplace(pack(callee_start.value, v.value), static_cast<GssNodeRef>(gss_.size()));
  if (inserted) {
    gss_.push_back({callee_start, v, {}, {}});
    gss_edge_sets_.emplace_back();
    pop_sets_.emplace_back();
  }
  return it->second;
}

void Engine::initialize(std::span<const VertexId> starts) {
  for (VertexId v : starts) {
    if (v.value >= graph_.vertex_count()) {
      throw EngineError("start vertex " + std::to_string(v.value) + " is not in the graph");
    }
  }
  for (VertexId v : starts) {
    GssNodeRef s = node_for(rsm_.entry(), v);
    add_descriptor({rsm_.entry(), v, s, Range::epsilon()});
  }
}

bool Engine::add_descriptor(const Descriptor& d) {
  bool fresh = seen_.insert(d).second;
  if (fresh) {
    queue_.push_back(d);
  } else {
    ++diag_.rejected_descriptors;
  }
  if (options_.record_trace) {
    trace_.push_back({fresh ? TraceEvent::Kind::Added : TraceEvent::Kind::Rejected, d});
  }
  return fresh;
}

std::vector<Descriptor> Engine::step_terminal(const Descriptor& d) {
  std::vector<Descriptor> out;
  const Point here{d.state, d.vertex};
  for (const TerminalMove& m : terminal_moves_[d.state.value]) {
    for (VertexId v1 : graph_.outgoing(d.vertex, m.label)) {
      const Point there{m.to, v1};
      write(here, there, IndexEntry::terminal(m.label));
      Range r;
      if (d.range.empty) {
        r = Range::of(here, there);
      } else {
        write(d.range.from, there, IndexEntry::intermediate(here));
        r = Range::of(d.range.from, there);
      }
      out.push_back({m.to, v1, d.gss, r});
    }
  }
  return out;
}

// Returns from the callee across GSS edge `e` with the completed range `pop`.
Descriptor Engine::pop_along(const GssEdge& e, VertexId w0, std::uint32_t callee_box, const Range& pop) {
  const VertexId v_end = pop.empty ? w0 : pop.to.vertex;
  const Point call{e.call_state, w0};
  const Point ret{e.return_state, v_end};
  write(call, ret, IndexEntry::nonterminal(callee_box));
  Range r;
  if (e.caller_range.empty) {
    r = Range::of(call, ret);
  } else {
    write(e.caller_range.from, ret, IndexEntry::intermediate(call));
    r = Range::of(e.caller_range.from, ret);
  }
  return {e.return_state, v_end, e.target, r};
}

std::vector<Descriptor> Engine::step_nonterminal(const Descriptor& d) {
  std::vector<Descriptor> out;
  for (const CallMove& m : call_moves_[d.state.value]) {
    GssNodeRef s1 = node_for(m.callee_start, d.vertex);
    GssEdge e{m.to, d.range, d.state, d.gss};
    if (gss_edge_sets_[s1].insert(e).second) {
      gss_[s1].edges.push_back(e);
      ++diag_.gss_edge_count;
      const std::vector<Range> pops = gss_[s1].stored_pops;
      for (const Range& pop : pops) out.push_back(pop_along(e, d.vertex, m.box, pop));
    }
    out.push_back({m.callee_start, d.vertex, s1, Range::epsilon()});
  }
  return out;
}

std::vector<Descriptor> Engine::step_final(const Descriptor& d) {
  std::vector<Descriptor> out;
  if (!pop_sets_[d.gss].insert(d.range).second) return out;
  gss_[d.gss].stored_pops.push_back(d.range);
  const VertexId w0 = gss_[d.gss].vertex;
  const std::uint32_t box = box_of_[d.state.value];
  if (d.range.empty) {
    const Point start{gss_[d.gss].callee_start, w0};
    write(start, start, IndexEntry::epsilon());
  }
  const std::vector<GssEdge> edges = gss_[d.gss].edges;
  for (const GssEdge& e : edges) out.push_back(pop_along(e, w0, box, d.range));
  return out;
}

void Engine::process(const Descriptor& d) {
  ++diag_.descriptor_count;
  if (options_.audit_handled && !handled_.insert(d).second) ++diag_.reprocessed_descriptors;
  if (options_.record_trace) trace_.push_back({TraceEvent::Kind::Processed, d});

  if (d.state == rsm_.after_call()) {
    Accepted a{gss_[d.gss].vertex, d.vertex, d.range};
    accepted_.push_back(a);
    if (options_.on_accept) options_.on_accept(a.source, a.target);
  }
  for (const Descriptor& next : step_terminal(d)) add_descriptor(next);
  for (const Descriptor& next : step_nonterminal(d)) add_descriptor(next);
  if (final_[d.state.value]) {
    for (const Descriptor& next : step_final(d)) add_descriptor(next);
  }
}

bool Engine::step() {
  if (queue_.empty()) return false;
  Descriptor d;
  if (options_.order == QueueOrder::Fifo) {
    d = queue_.front();
    queue_.pop_front();
  } else {
    d = queue_.back();
    queue_.pop_back();
  }
  process(d);
  return true;
}

QueryResult Engine::run() {
  while (step()) {
  }
  diag_.gss_node_count = gss_.size();
  QueryResult r;
  r.rsm = rsm_;
  r.graph = &graph_;
  r.index = std::move(index_);
  r.accepted = std::move(accepted_);
  r.diagnostics = diag_;
  r.trace = std::move(trace_);
  std::sort(r.accepted.begin(), r.accepted.end());
  return r;
}

QueryResult run_query(const ExtendedRsm& rsm, const Graph& graph, std::span<const VertexId> starts,
                      EngineOptions options) {
  Engine engine(rsm, graph, std::move(options));
  engine.initialize(starts);
  return engine.run();
}

QueryResult run_rpq(const Regex& regex, const Graph& graph, std::span<const VertexId> starts,
                    EngineOptions options) {
  ExtendedRsm rsm = extend_rsm(build_rsm(single_rule_grammar(regex, "S")));
  return run_query(rsm, graph, starts, std::move(options));
}

std::string point_text(const Point& p, const Graph& g, const Rsm& rsm) {
  return rsm.state_name(p.state) + "," + g.vertex_name(p.vertex);
}

std::string entry_text(const IndexEntry& e, const Graph& g, const Rsm& rsm) {
  switch (e.kind) {
    case IndexEntry::Kind::Terminal:
      return g.label_name(LabelId{e.value});
    case IndexEntry::Kind::Nonterminal:
      return rsm.box(e.value).nonterminal;
    case IndexEntry::Kind::Epsilon:
      return "eps";
    case IndexEntry::Kind::Intermediate:
      return "I_{" + point_text(e.point, g, rsm) + "}";
  }
  return {};
}

}  // namespace cfpq
