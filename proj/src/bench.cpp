#include "cfpq/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "cfpq/results.hpp"

namespace cfpq::bench {

std::map<std::string, QueryTemplate> builtin_queries() {
  std::map<std::string, QueryTemplate> q;
  auto add = [&](QueryTemplate t) { q.emplace(t.name, std::move(t)); };
  add({"G1", QueryKind::Cfg, "S -> a_r S a | b_r S b | a_r a | b_r b", {"a", "b"},
       {{"a", "subClassOf"}, {"b", "type"}}});
  add({"G2", QueryKind::Cfg, "S -> a_r S a | a", {"a"}, {{"a", "subClassOf"}}});
  add({"Geo", QueryKind::Cfg, "S -> a S a_r | a a_r", {"a"}, {{"a", "broaderTransitive"}}});
  add({"reg1", QueryKind::Rpq, "S -> (a | b)*", {"a", "b"}, {}});
  add({"reg2", QueryKind::Rpq, "S -> a* b*", {"a", "b"}, {}});
  add({"reg3", QueryKind::Rpq, "S -> (a | b | c)+", {"a", "b", "c"}, {}});
  add({"reg4", QueryKind::Rpq, "S -> (a | b)+ (c | d)+", {"a", "b", "c", "d"}, {}});
  return q;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<std::string> labels_by_frequency(const Graph& g, const std::string& inverse_suffix) {
  std::vector<LabelCount> counts = g.stats().per_label;
  std::erase_if(counts, [&](const LabelCount& c) {
    return ends_with(c.name, inverse_suffix) &&
           g.find_label(c.name.substr(0, c.name.size() - inverse_suffix.size())).has_value();
  });
  std::sort(counts.begin(), counts.end(), [](const LabelCount& a, const LabelCount& b) {
    if (a.edges != b.edges) return a.edges > b.edges;
    return a.name < b.name;
  });
  std::vector<std::string> out;
  for (const auto& c : counts) out.push_back(c.name);
  return out;
}

BoundQuery instantiate(const QueryTemplate& t, const Graph& g, const std::string& inverse_suffix) {
  BoundQuery q;
  q.name = t.name;
  q.kind = t.kind;
  q.grammar = parse_grammar_text(t.text);
  q.binding = t.fixed;

  std::set<std::string> used;
  for (const auto& [_, label] : q.binding) used.insert(label);
  auto frequent = labels_by_frequency(g, inverse_suffix);
  auto next = frequent.begin();
  for (const std::string& p : t.placeholders) {
    if (q.binding.contains(p)) continue;
    while (next != frequent.end() && used.contains(*next)) ++next;
    // too few labels: leave the placeholder name, which matches nothing
    std::string label = next != frequent.end() ? *next++ : p;
    used.insert(label);
    q.binding.emplace(p, label);
  }

  auto rename = [&](const std::string& name) {
    if (auto it = q.binding.find(name); it != q.binding.end()) return it->second;
    if (ends_with(name, "_r")) {
      auto base = q.binding.find(name.substr(0, name.size() - 2));
      if (base != q.binding.end()) return base->second + inverse_suffix;
    }
    return name;
  };
  for (auto& p : q.grammar.productions) rename_terminals(p.rhs, rename);
  for (const std::string& label : terminals_of(q.grammar)) {
    if (!g.find_label(label)) q.missing_labels.push_back(label);
  }
  return q;
}

std::size_t selected_vertex_count(std::size_t n) {
  if (n < 10'000) return n;
  if (n <= 100'000) return (n + 9) / 10;
  return (n + 99) / 100;
}

std::vector<Chunking> chunk_starts(const Graph& g, std::span<const std::size_t> sizes, std::uint64_t seed) {
  if (sizes.empty()) throw BenchError("chunk sizes must not be empty");
  std::vector<VertexId> order(g.vertex_count());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = VertexId{i};
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(selected_vertex_count(order.size()));

  std::vector<Chunking> out;
  for (std::size_t size : sizes) {
    if (size == 0) throw BenchError("chunk size must be positive");
    Chunking c{size, {}};
    for (std::size_t i = 0; i < order.size(); i += size) {
      auto end = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + size));
      c.chunks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), end);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string mode_name(Mode m) { return m == Mode::Ebnf ? "ebnf-rsm" : "bnf-rsm"; }

Mode parse_mode(const std::string& s) {
  if (s == "ebnf" || s == "ebnf-rsm") return Mode::Ebnf;
  if (s == "bnf" || s == "bnf-rsm") return Mode::Bnf;
  throw BenchError("unknown mode `" + s + "` (expected ebnf or bnf)");
}

ExtendedRsm compile(const EbnfGrammar& g, Mode m) {
  if (m == Mode::Ebnf) return extend_rsm(build_rsm(g));
  return extend_rsm(build_rsm_from_bnf(ebnf_to_bnf(g)));
}

// ---------------------------------------------------------------------------
// Scenario files

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

std::uint64_t parse_number(const std::string& v, std::size_t line) {
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v.front() == '-') {
    throw BenchError("scenario line " + std::to_string(line) + ": `" + v + "` is not a number");
  }
  return n;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? p : (fs::path(base_dir) / path).string();
  };
  Scenario s;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw BenchError("scenario line " + std::to_string(line) + ": expected `key = value`");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key == "name") {
      s.name = value;
    } else if (key == "graph") {
      s.graph_path = resolve(value);
    } else if (key == "query") {
      s.query = value;
    } else if (key == "grammar") {
      s.grammar_path = resolve(value);
    } else if (key == "chunk_sizes") {
      s.chunk_sizes.clear();
      for (const auto& part : split(value, ',')) s.chunk_sizes.push_back(parse_number(part, line));
    } else if (key == "chunks") {
      for (const auto& chunk : split(value, ';')) s.explicit_chunks.push_back(split(chunk, ','));
    } else if (key == "seed") {
      s.seed = parse_number(value, line);
    } else if (key == "modes") {
      s.modes.clear();
      for (const auto& part : split(value, ',')) s.modes.push_back(parse_mode(part));
    } else if (key == "repeats") {
      s.repeats = parse_number(value, line);
    } else if (key == "max_chunks") {
      s.max_chunks = parse_number(value, line);
    } else if (key == "add_inverse") {
      if (value != "true" && value != "false") {
        throw BenchError("scenario line " + std::to_string(line) + ": add_inverse must be true or false");
      }
      s.add_inverse = value == "true";
    } else if (key == "inverse_suffix") {
      s.inverse_suffix = value;
    } else {
      throw BenchError("scenario line " + std::to_string(line) + ": unknown key `" + key + "`");
    }
  }
  if (s.graph_path.empty()) throw BenchError("scenario has no `graph`");
  if (s.query.empty() == s.grammar_path.empty()) {
    throw BenchError("scenario needs exactly one of `query` and `grammar`");
  }
  if (s.modes.empty()) throw BenchError("scenario has no modes");
  if (s.repeats == 0) throw BenchError("repeats must be positive");
  if (s.chunk_sizes.empty() && s.explicit_chunks.empty()) throw BenchError("scenario has no chunk sizes");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  namespace fs = std::filesystem;
  Scenario s = parse_scenario(buf.str(), fs::path(path).parent_path().string());
  if (s.name.empty()) s.name = fs::path(path).stem().string();
  return s;
}

void apply_env_overrides(Scenario& s) {
  if (const char* seed = std::getenv("CFPQ_SEED")) s.seed = parse_number(seed, 0);
}

// ---------------------------------------------------------------------------
// Running

std::vector<RunRecord> run_workload(const Workload& w, unsigned jobs) {
  std::vector<ExtendedRsm> machines;
  for (Mode m : w.modes) machines.push_back(compile(w.grammar, m));

  struct Task {
    std::size_t mode;
    std::size_t chunking;
    std::size_t chunk;
    std::size_t repeat;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < w.modes.size(); ++m) {
    for (std::size_t c = 0; c < w.chunkings.size(); ++c) {
      for (std::size_t k = 0; k < w.chunkings[c].chunks.size(); ++k) {
        for (std::size_t r = 0; r < w.repeats; ++r) tasks.push_back({m, c, k, r});
      }
    }
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      const auto& starts = w.chunkings[t.chunking].chunks[t.chunk];
      auto begin = std::chrono::steady_clock::now();
      QueryResult qr = run_query(machines[t.mode], *w.graph, starts);
      auto end = std::chrono::steady_clock::now();
      RunRecord& r = records[i];
      r.scenario = w.name;
      r.mode = w.modes[t.mode];
      r.chunk_size = w.chunkings[t.chunking].size;
      r.chunk = t.chunk;
      r.repeat = t.repeat;
      r.millis = std::chrono::duration<double, std::milli>(end - begin).count();
      r.pairs = reachable_pairs(qr).size();
      r.descriptors = qr.diagnostics.descriptor_count;
      r.gss_nodes = qr.diagnostics.gss_node_count;
      r.gss_edges = qr.diagnostics.gss_edge_count;
    }
  };
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return records;
}

std::vector<RunRecord> run_scenario(const Scenario& s, unsigned jobs, std::ostream* warnings) {
  EdgeListOptions options;
  options.add_inverse = s.add_inverse;
  options.inverse_suffix = s.inverse_suffix;
  Graph graph = Graph::load_edge_list_file(s.graph_path, options);

  Workload w;
  w.name = s.name;
  w.graph = &graph;
  w.modes = s.modes;
  w.repeats = s.repeats;
  if (!s.query.empty()) {
    auto all = builtin_queries();
    auto it = all.find(s.query);
    if (it == all.end()) throw BenchError("unknown query `" + s.query + "`");
    BoundQuery q = instantiate(it->second, graph, s.inverse_suffix);
    if (warnings) {
      for (const auto& label : q.missing_labels) {
        *warnings << "warning: label `" << label << "` does not occur in the graph\n";
      }
    }
    w.grammar = std::move(q.grammar);
  } else {
    std::ifstream in(s.grammar_path);
    if (!in) throw BenchError("cannot open grammar file: " + s.grammar_path);
    std::stringstream buf;
    buf << in.rdbuf();
    w.grammar = parse_grammar_text(buf.str());
  }

  if (!s.explicit_chunks.empty()) {
    for (const auto& names : s.explicit_chunks) {
      Chunking c{names.size(), {{}}};
      for (const auto& name : names) {
        auto v = graph.find_vertex(name);
        if (!v) throw BenchError("chunk vertex `" + name + "` is not in the graph");
        c.chunks.front().push_back(*v);
      }
      w.chunkings.push_back(std::move(c));
    }
  } else {
    w.chunkings = chunk_starts(graph, s.chunk_sizes, s.seed);
    if (s.max_chunks > 0) {
      for (auto& c : w.chunkings) {
        if (c.chunks.size() > s.max_chunks) c.chunks.resize(s.max_chunks);
      }
    }
  }
  return run_workload(w, jobs);
}

// ---------------------------------------------------------------------------
// Reporting

std::vector<Summary> summarize(std::span<const RunRecord> records) {
  std::vector<Summary> out;
  for (const RunRecord& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Summary& s) {
      return s.scenario == r.scenario && s.mode == r.mode && s.chunk_size == r.chunk_size;
    });
    if (it == out.end()) {
      out.push_back({r.scenario, r.mode, r.chunk_size, 0, 0, 0, 0});
      it = std::prev(out.end());
    }
    ++it->runs;
    it->mean_millis += r.millis;
    it->mean_pairs += static_cast<double>(r.pairs);
    it->mean_descriptors += static_cast<double>(r.descriptors);
  }
  for (Summary& s : out) {
    const auto n = static_cast<double>(s.runs);
    s.mean_millis /= n;
    s.mean_pairs /= n;
    s.mean_descriptors /= n;
  }
  return out;
}

SpeedupReport speedup_report(std::span<const RunRecord> records) {
  SpeedupReport report;
  const auto summaries = summarize(records);
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (const Summary& s : summaries) {
    std::pair key{s.scenario, s.chunk_size};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  double log_sum = 0;
  for (const auto& [scenario, size] : keys) {
    const Summary* bnf = nullptr;
    const Summary* ebnf = nullptr;
    for (const Summary& s : summaries) {
      if (s.scenario != scenario || s.chunk_size != size) continue;
      (s.mode == Mode::Bnf ? bnf : ebnf) = &s;
    }
    if (!bnf || !ebnf) {
      throw BenchError("scenario `" + scenario + "` chunk size " + std::to_string(size) +
                       " was not run in both modes");
    }
    // guard against a zero denominator on sub-resolution timings
    double ratio = bnf->mean_millis / std::max(ebnf->mean_millis, 1e-9);
    report.rows.push_back({scenario, size, bnf->mean_millis, ebnf->mean_millis, ratio});
    log_sum += std::log(std::max(ratio, 1e-12));
  }
  if (!report.rows.empty()) report.geometric_mean = std::exp(log_sum / static_cast<double>(report.rows.size()));
  return report;
}

void write_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "scenario,mode,chunk_size,repeat,millis,pairs,descriptors,gss_nodes,gss_edges\n";
  for (const RunRecord& r : records) {
    out << r.scenario << ',' << mode_name(r.mode) << ',' << r.chunk_size << ',' << r.repeat << ','
        << std::fixed << std::setprecision(3) << r.millis << std::defaultfloat << ',' << r.pairs << ','
        << r.descriptors << ',' << r.gss_nodes << ',' << r.gss_edges << '\n';
  }
}

void write_summary(std::ostream& out, std::span<const Summary> rows) {
  out << "scenario,mode,chunk_size,runs,mean_millis,mean_pairs,mean_descriptors\n";
  for (const Summary& s : rows) {
    out << s.scenario << ',' << mode_name(s.mode) << ',' << s.chunk_size << ',' << s.runs << ','
        << std::fixed << std::setprecision(3) << s.mean_millis << ',' << s.mean_pairs << ','
        << s.mean_descriptors << std::defaultfloat << '\n';
  }
}

void write_speedup(std::ostream& out, const SpeedupReport& report) {
  out << "scenario,chunk_size,bnf_millis,ebnf_millis,speedup\n";
  out << std::fixed << std::setprecision(3);
  for (const SpeedupRow& r : report.rows) {
    out << r.scenario << ',' << r.chunk_size << ',' << r.bnf_millis << ',' << r.ebnf_millis << ','
        << r.ratio << '\n';
  }
  out << "geometric_mean,," << ",," << report.geometric_mean << '\n' << std::defaultfloat;
}

}  // namespace cfpq::bench
