#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "anoncomp/extrema.hpp"
#include "anoncomp/graph.hpp"
#include "anoncomp/verification.hpp"

namespace anoncomp {

/// Malformed scenario, spec or graph description (exit code 1).
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ProtocolKind { average, max_track, min_track, frequency, compiled };
enum class TraceLevel { none, outputs, full };

/// ring N | complete N | path N | star LEAVES | random N EXTRA [SEED] |
/// explicit N (followed by edge or node lines in the scenario)
struct GraphSpec {
  std::string kind = "ring";
  std::size_t n = 0;
  std::size_t extra = 0;
  std::optional<std::uint64_t> seed;
  std::vector<Edge> edges;
  /// "node i: j/r ..." rows; used verbatim, validated on build.
  std::vector<std::vector<PortEdge>> table;
};

GraphSpec parse_graph_spec(std::string_view text);
PortLabeledGraph build_graph(const GraphSpec& spec, std::uint64_t default_seed);

struct Scenario {
  std::string name = "scenario";
  GraphSpec graph;
  int alphabet = 1;
  /// Empty means random values drawn with `seed`.
  std::vector<int> values;
  std::uint64_t seed = 1;
  ProtocolKind protocol = ProtocolKind::average;
  /// Level-set spec file for the compiled protocol, relative to the scenario.
  std::string spec_path;
  std::vector<InputChange> changes;
  std::size_t max_rounds = 100000;
  std::optional<int> h_max;
  std::optional<std::size_t> m_max;
  int target = 1;
  bool oracle = true;
  TraceLevel trace = TraceLevel::none;
  std::filesystem::path base_dir;
};

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);
std::string protocol_name(ProtocolKind kind);

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_invariant = 2, exit_oracle = 3 };

struct ScenarioResult {
  int exit_code = exit_ok;
  /// Human-readable, deterministic summary.
  std::string summary;
  /// One line per round; empty when tracing is off.
  std::string trace;
  OracleReport report;
  /// First failing check, empty on success.
  std::string diagnostic;
};

/// Builds the graph and inputs, runs the protocol with per-round invariant
/// checks and compares the result with the oracle.
ScenarioResult run_scenario(const Scenario& scenario);
/// Oracle only: the expected output without running the protocol.
std::string oracle_summary(const Scenario& scenario);

/// Parameter ranges for a sweep; an empty range keeps the base value.
struct SweepRanges {
  std::vector<std::size_t> n;
  std::vector<std::uint64_t> seeds;
  std::vector<int> alphabet;
  std::vector<int> h_max;
  std::vector<std::size_t> max_rounds;
  /// Non-empty turns the sweep into replication checks on ring(n) vs ring(k n).
  std::vector<std::size_t> replicate;
};

/// "lo..hi" or "a,b,c"
std::vector<std::int64_t> parse_range(std::string_view text);

struct SweepRun {
  std::string label;
  bool passed = false;
  std::size_t rounds = 0;
  std::string diagnostic;
};

struct SweepReport {
  std::vector<SweepRun> runs;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t max_rounds = 0;

  std::string text() const;
};

/// Cartesian product of the ranges over the base scenario; runs in parallel,
/// reported in a fixed order.
SweepReport sweep(const Scenario& base, const SweepRanges& ranges);

}  // namespace anoncomp
