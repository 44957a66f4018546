// Command-line front end: reachability, paths, SPPF export, grammar inspection,
// benchmark scenarios and graph statistics.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "cfpq/bench.hpp"
#include "cfpq/results.hpp"

namespace {

using namespace cfpq;

constexpr int kExitInput = 1;
constexpr int kExitUnknownVertex = 2;
constexpr int kExitNoDerivation = 3;

class UnknownVertex : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueryArgs {
  std::string graph;
  std::string grammar;
  std::string query;
  std::string inverse_suffix;
  std::string mode = "ebnf";
};

void add_query_options(CLI::App* cmd, QueryArgs& a, bool need_graph = true) {
  auto* g = cmd->add_option("--graph", a.graph, "edge list file (`source label target` per line)");
  if (need_graph) g->required()->check(CLI::ExistingFile);
  auto* grammar = cmd->add_option("--grammar", a.grammar, "grammar file")->check(CLI::ExistingFile);
  auto* query = cmd->add_option("--query", a.query, "builtin query: G1, G2, Geo, reg1..reg4");
  grammar->excludes(query);
  cmd->add_option("--add-inverse", a.inverse_suffix, "add an inverse edge per edge, label + SUFFIX");
  cmd->add_option("--mode", a.mode, "grammar to RSM pipeline")->check(CLI::IsMember({"ebnf", "bnf"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Graph load_graph(const QueryArgs& a) {
  EdgeListOptions options;
  if (!a.inverse_suffix.empty()) {
    options.add_inverse = true;
    options.inverse_suffix = a.inverse_suffix;
  }
  return Graph::load_edge_list_file(a.graph, options);
}

EbnfGrammar load_grammar(const QueryArgs& a, const Graph& g, bool warn = true) {
  if (!a.grammar.empty()) {
    EbnfGrammar grammar = parse_grammar_text(read_file(a.grammar));
    auto diagnostics = validate(grammar);
    if (!diagnostics.empty()) throw std::runtime_error("invalid grammar: " + diagnostics.front().message);
    return grammar;
  }
  if (a.query.empty()) throw CLI::ValidationError("one of --grammar and --query is required");
  auto all = bench::builtin_queries();
  auto it = all.find(a.query);
  if (it == all.end()) throw CLI::ValidationError("unknown query " + a.query);
  auto bound = bench::instantiate(it->second, g, a.inverse_suffix.empty() ? "_r" : a.inverse_suffix);
  for (const auto& label : warn ? bound.missing_labels : std::vector<std::string>{}) {
    std::cerr << "warning: label `" << label << "` does not occur in the graph\n";
  }
  return bound.grammar;
}

VertexId vertex_named(const Graph& g, const std::string& name) {
  auto v = g.find_vertex(name);
  if (!v) throw UnknownVertex("unknown vertex `" + name + "`");
  return *v;
}

std::vector<VertexId> parse_starts(const Graph& g, const std::string& spec) {
  std::vector<std::string> names;
  std::string text = spec;
  if (!spec.empty() && std::filesystem::is_regular_file(spec)) {
    text = read_file(spec);
  }
  std::replace_if(text.begin(), text.end(), [](char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); }, ' ');
  std::istringstream in(text);
  for (std::string name; in >> name;) names.push_back(name);

  std::vector<VertexId> out;
  for (const auto& n : names) out.push_back(vertex_named(g, n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Output goes to --out when given, standard output otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_reach(const QueryArgs& a, const std::string& starts_spec, const std::string& out_path) {
  Graph g = load_graph(a);
  ExtendedRsm rsm = bench::compile(load_grammar(a, g), bench::parse_mode(a.mode));
  std::vector<VertexId> starts;
  if (starts_spec.empty()) {
    for (std::uint32_t i = 0; i < g.vertex_count(); ++i) starts.push_back(VertexId{i});
  } else {
    starts = parse_starts(g, starts_spec);
  }
  std::sort(starts.begin(), starts.end(),
            [&](VertexId x, VertexId y) { return g.vertex_name(x) < g.vertex_name(y); });

  Sink sink(out_path);
  std::ostream& out = sink.get();
  // one source at a time, so sorted output can be flushed as soon as a source finishes
  for (VertexId s : starts) {
    VertexId one[] = {s};
    QueryResult qr = run_query(rsm, g, one);
    write_pairs_csv(out, g, reachable_pairs(qr));
    out.flush();
  }
  return 0;
}

int cmd_paths(const QueryArgs& a, const std::string& source, const std::string& target, std::size_t max_paths,
              std::size_t max_length, const std::string& out_path) {
  Graph g = load_graph(a);
  ExtendedRsm rsm = bench::compile(load_grammar(a, g), bench::parse_mode(a.mode));
  VertexId s = vertex_named(g, source);
  VertexId t = vertex_named(g, target);
  VertexId one[] = {s};
  QueryResult qr = run_query(rsm, g, one);
  auto paths = enumerate_paths(qr, s, t, {max_paths, max_length});
  if (paths.empty()) {
    std::cerr << "no path from " << source << " to " << target << " within length " << max_length << "\n";
    return 0;
  }
  Sink sink(out_path);
  for (const Path& p : paths) sink.get() << format_path(g, p) << '\n';
  return 0;
}

int cmd_sppf(const QueryArgs& a, const std::string& source, const std::string& target, const std::string& out_path) {
  Graph g = load_graph(a);
  ExtendedRsm rsm = bench::compile(load_grammar(a, g), bench::parse_mode(a.mode));
  VertexId s = vertex_named(g, source);
  VertexId t = vertex_named(g, target);
  VertexId one[] = {s};
  QueryResult qr = run_query(rsm, g, one);
  Sppf sppf = build_sppf(qr, root_range(qr, s, t));
  Sink sink(out_path);
  sink.get() << sppf_to_dot(sppf);
  std::cerr << "sppf: " << sppf.nodes.size() << " nodes, " << sppf.edge_count() << " edges\n";
  return 0;
}

int cmd_grammar_inspect(const QueryArgs& a, bool extended, const std::string& out_path) {
  Graph empty;
  EbnfGrammar grammar = load_grammar(a, empty, false);
  bench::Mode mode = bench::parse_mode(a.mode);
  Rsm rsm = mode == bench::Mode::Ebnf ? build_rsm(grammar) : build_rsm_from_bnf(ebnf_to_bnf(grammar));
  if (extended) rsm = extend_rsm(rsm).machine();
  Sink sink(out_path);
  sink.get() << rsm_to_dot(rsm);
  std::ostream& info = out_path.empty() ? std::cerr : std::cout;
  info << "boxes: " << rsm.boxes().size() << ", states: " << rsm.state_count()
       << ", transitions: " << rsm.transition_count() << '\n';
  return 0;
}

int cmd_bench(const std::string& scenario_path, const std::string& out_path, unsigned jobs) {
  bench::Scenario s = bench::load_scenario(scenario_path);
  bench::apply_env_overrides(s);
  auto records = bench::run_scenario(s, jobs, &std::cerr);
  Sink sink(out_path);
  bench::write_csv(sink.get(), records);
  auto summary = bench::summarize(records);
  bench::write_summary(std::cerr, summary);
  bool ebnf = std::find(s.modes.begin(), s.modes.end(), bench::Mode::Ebnf) != s.modes.end();
  bool bnf = std::find(s.modes.begin(), s.modes.end(), bench::Mode::Bnf) != s.modes.end();
  if (ebnf && bnf) bench::write_speedup(std::cerr, bench::speedup_report(records));
  return 0;
}

int cmd_stats(const QueryArgs& a) {
  Graph g = load_graph(a);
  GraphStats st = g.stats();
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& l : st.per_label) labels[l.name] = l.edges;
  nlohmann::json j{{"vertices", st.vertex_count}, {"edges", st.edge_count}, {"labels", labels}};
  std::cout << j.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-free path queries over edge-labelled graphs"};
  app.require_subcommand(1);

  QueryArgs qa;
  std::string starts, out, source, target, scenario;
  std::size_t max_paths = 1;
  std::size_t max_length = 10;
  bool extended = false;
  unsigned jobs = 1;

  auto* reach = app.add_subcommand("reach", "reachable pairs as CSV, sorted by vertex name");
  add_query_options(reach, qa);
  reach->add_option("--starts", starts, "comma-separated vertex names or a file of names (default: all)");
  reach->add_option("--out", out, "output file (default: standard output)");

  auto* paths = app.add_subcommand("paths", "witness paths, shortest first");
  add_query_options(paths, qa);
  paths->add_option("--source", source)->required();
  paths->add_option("--target", target)->required();
  paths->add_option("--max-paths", max_paths)->check(CLI::PositiveNumber);
  paths->add_option("--max-length", max_length)->check(CLI::PositiveNumber);
  paths->add_option("--out", out);

  auto* sppf = app.add_subcommand("sppf", "SPPF of a pair as Graphviz text");
  add_query_options(sppf, qa);
  sppf->add_option("--source", source)->required();
  sppf->add_option("--target", target)->required();
  sppf->add_option("--out", out);

  auto* inspect = app.add_subcommand("grammar-inspect", "RSM of a grammar as Graphviz text");
  add_query_options(inspect, qa, false);
  inspect->add_flag("--extended", extended, "include the synthetic start box");
  inspect->add_option("--out", out);

  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark scenario file");
  bench_cmd->add_option("--scenario", scenario)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", out, "CSV output (default: standard output)");
  bench_cmd->add_option("--jobs", jobs, "parallel engine runs")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "vertex, edge and per-label counts as JSON");
  stats->add_option("--graph", qa.graph)->required()->check(CLI::ExistingFile);
  stats->add_option("--add-inverse", qa.inverse_suffix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*reach) return cmd_reach(qa, starts, out);
    if (*paths) return cmd_paths(qa, source, target, max_paths, max_length, out);
    if (*sppf) return cmd_sppf(qa, source, target, out);
    if (*inspect) return cmd_grammar_inspect(qa, extended, out);
    if (*bench_cmd) return cmd_bench(scenario, out, jobs);
    if (*stats) return cmd_stats(qa);
  } catch (const UnknownVertex& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknownVertex;
  } catch (const NoDerivation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoDerivation;
  } catch (const ParseError& e) {
    std::cerr << "error: graph line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const GrammarError& e) {
    std::cerr << "error: grammar: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
