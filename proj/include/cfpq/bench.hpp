#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfpq/gll.hpp"
#include "cfpq/grammar.hpp"
#include "cfpq/graph.hpp"

namespace cfpq::bench {

class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class QueryKind : std::uint8_t { Cfg, Rpq };

/// Grammar text over placeholder terminals a, b, c, d. `x_r` denotes the
/// inverse of whatever `x` is bound to.
struct QueryTemplate {
  std::string name;
  QueryKind kind = QueryKind::Cfg;
  std::string text;
  std::vector<std::string> placeholders;
  std::map<std::string, std::string> fixed;  // placeholders with a prescribed relation
};

std::map<std::string, QueryTemplate> builtin_queries();

struct BoundQuery {
  std::string name;
  QueryKind kind = QueryKind::Cfg;
  EbnfGrammar grammar;
  std::map<std::string, std::string> binding;
  std::vector<std::string> missing_labels;  // bound terminals with no edges in the graph
};

/// Non-inverse labels by descending edge count, ties by name.
std::vector<std::string> labels_by_frequency(const Graph& g, const std::string& inverse_suffix = "_r");

/// Binds fixed placeholders as prescribed and the rest to the most frequent
/// remaining labels.
BoundQuery instantiate(const QueryTemplate& t, const Graph& g, const std::string& inverse_suffix = "_r");

/// Start-vertex chunks for one chunk size.
struct Chunking {
  std::size_t size = 0;
  std::vector<std::vector<VertexId>> chunks;
};

/// All vertices below 10 000, 10% up to 100 000, 1% beyond.
std::size_t selected_vertex_count(std::size_t vertex_count);

/// Seeded permutation of the selected vertices, cut into consecutive chunks of
/// each size (the last chunk may be short).
std::vector<Chunking> chunk_starts(const Graph& g, std::span<const std::size_t> sizes, std::uint64_t seed);

enum class Mode : std::uint8_t { Ebnf, Bnf };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// Builds the extended machine for `g` through the pipeline selected by `m`.
ExtendedRsm compile(const EbnfGrammar& g, Mode m);

struct Scenario {
  std::string name;
  std::string graph_path;
  std::string query;         // builtin template name
  std::string grammar_path;  // used when `query` is empty
  std::vector<std::size_t> chunk_sizes{1, 10, 100};
  std::vector<std::vector<std::string>> explicit_chunks;  // overrides chunk_sizes
  std::uint64_t seed = 42;
  std::vector<Mode> modes{Mode::Ebnf};
  std::size_t repeats = 1;
  std::size_t max_chunks = 0;  // per chunk size; 0 = all
  bool add_inverse = false;
  std::string inverse_suffix = "_r";
};

/// `key = value` lines; `#` starts a comment. Relative paths resolve against `base_dir`.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

/// Applies CFPQ_SEED when set.
void apply_env_overrides(Scenario& s);

struct RunRecord {
  std::string scenario;
  Mode mode = Mode::Ebnf;
  std::size_t chunk_size = 0;
  std::size_t chunk = 0;
  std::size_t repeat = 0;
  double millis = 0;
  std::size_t pairs = 0;
  std::size_t descriptors = 0;
  std::size_t gss_nodes = 0;
  std::size_t gss_edges = 0;
};

struct Workload {
  std::string name;
  const Graph* graph = nullptr;
  EbnfGrammar grammar;
  std::vector<Mode> modes{Mode::Ebnf};
  std::vector<Chunking> chunkings;
  std::size_t repeats = 1;
};

/// One record per mode, chunk and repeat, in that nesting order regardless of `jobs`.
std::vector<RunRecord> run_workload(const Workload& w, unsigned jobs = 1);

/// Loads graph and query, then runs. Missing labels are reported to `warnings`.
std::vector<RunRecord> run_scenario(const Scenario& s, unsigned jobs = 1, std::ostream* warnings = nullptr);

struct Summary {
  std::string scenario;
  Mode mode;
  std::size_t chunk_size;
  std::size_t runs;
  double mean_millis;
  double mean_pairs;
  double mean_descriptors;
};

std::vector<Summary> summarize(std::span<const RunRecord> records);

struct SpeedupRow {
  std::string scenario;
  std::size_t chunk_size;
  double bnf_millis;
  double ebnf_millis;
  double ratio;  // bnf / ebnf
};

struct SpeedupReport {
  std::vector<SpeedupRow> rows;
  double geometric_mean = 1.0;
};

/// Throws BenchError when a (scenario, chunk size) lacks one of the two modes.
SpeedupReport speedup_report(std::span<const RunRecord> records);

void write_csv(std::ostream& out, std::span<const RunRecord> records);
void write_summary(std::ostream& out, std::span<const Summary> rows);
void write_speedup(std::ostream& out, const SpeedupReport& report);

}  // namespace cfpq::bench
