#pragma once

#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "anoncomp/averaging.hpp"
#include "anoncomp/compiler.hpp"
#include "anoncomp/engine.hpp"
#include "anoncomp/extrema.hpp"
#include "anoncomp/frequency.hpp"
#include "anoncomp/graph.hpp"

namespace anoncomp {

IntervalValue oracle_average(std::span<const int> x, int alphabet_max);
ProportionVector oracle_proportions(std::span<const int> x, int alphabet_max);
/// Level index of the first matching clause; CoverageError if none matches.
std::size_t oracle_evaluate(const LevelSetSpec& spec, const ProportionVector& p);

/// Smallest m >= 1 with m * p integral.
std::size_t least_integral_multiple(const Rational& p);

struct OracleReport {
  std::string expected;
  std::string observed;
  bool agree = false;
  bool quiescent = false;
  std::size_t rounds = 0;
  /// One line per broken invariant, in the order observed.
  std::vector<std::string> violations;

  bool passed() const { return agree && violations.empty(); }
};

/// "v" when every entry prints as v, otherwise "[a, b, ...]".
template <class T, class Print>
std::string consensus_text(const std::vector<T>& values, Print print) {
  std::vector<std::string> text;
  for (const auto& v : values) text.push_back(print(v));
  bool same = true;
  for (const auto& t : text) same = same && t == text.front();
  if (same && !text.empty()) return text.front();
  std::string joined = "[";
  for (std::size_t i = 0; i < text.size(); ++i) joined += (i ? ", " : "") + text[i];
  return joined + "]";
}

std::string output_text(const std::optional<IntervalValue>& y);
std::string output_text(const std::optional<FrequencyReadout>& y);

/// Steps the averaging protocol, checking pebble conservation every round and
/// the spread and oracle at quiescence.
OracleReport audit_averaging(const PortLabeledGraph& graph, std::span<const int> x, const AvgParams& params,
                             const RunOptions& options);

/// All estimates equal the final maximum (minimum) and every pointer chain
/// ends at a node holding it.
OracleReport audit_tracker(const PortLabeledGraph& graph, std::span<const int> initial,
                           std::span<const InputChange> changes, const TrackerParams& params,
                           const RunOptions& options);

/// Final outputs against oracle_evaluate, with per-comparison conservation.
OracleReport audit_compiled(const PortLabeledGraph& graph, std::span<const int> x, const CompiledProtocol& protocol,
                            const RunOptions& options);

/// Settled readout equals p_target exactly at every node and m* is least.
OracleReport audit_frequency(const PortLabeledGraph& graph, std::span<const int> x, const FrequencyParams& params,
                             const RunOptions& options);

/// Runs (G, x) and (pi(G), pi(x)) side by side and requires
/// S'_{pi(i)}(t) == S_i(t) for every node and round until both stop.
template <Protocol P>
OracleReport check_equivariance(const P& protocol, const PortLabeledGraph& graph,
                                std::span<const typename P::Input> x, std::span<const NodeId> permutation,
                                std::size_t max_rounds = 2000) {
  std::vector<typename P::Input> moved(x.size());
  for (NodeId i = 0; i < x.size(); ++i) moved.at(permutation[i]) = x[i];
  Simulator<P> original(graph, protocol, x);
  Simulator<P> image(apply_isomorphism(graph, permutation), protocol, moved);

  OracleReport report;
  report.expected = "S'_pi(i)(t) = S_i(t)";
  auto compare = [&]() {
    for (NodeId i = 0; i < x.size(); ++i) {
      if (!(original.configuration().nodes[i] == image.configuration().nodes[permutation[i]])) {
        report.violations.push_back("node " + std::to_string(i) + " diverges from its image " +
                                    std::to_string(permutation[i]) + " at round " +
                                    std::to_string(original.round()));
        return false;
      }
    }
    return true;
  };
  bool ok = compare();
  while (ok && report.rounds < max_rounds) {
    const bool a = original.step();
    const bool b = image.step();
    ++report.rounds;
    ok = compare();
    if (a && b) {
      report.quiescent = true;
      break;
    }
  }
  report.agree = ok;
  report.observed = ok ? report.expected : report.violations.front();
  return report;
}

/// Runs ring(m) on x and ring(k*m) on x repeated k times and requires node i
/// of the small ring to match nodes i, i+m, ... of the large one every round.
template <Protocol P>
OracleReport check_replication(const P& protocol, std::span<const typename P::Input> x, std::size_t k,
                               std::size_t max_rounds = 5000) {
  const std::size_t m = x.size();
  if (m < 2 || k < 1) throw std::invalid_argument("replication needs m >= 2 and k >= 1");
  std::vector<typename P::Input> repeated;
  for (std::size_t j = 0; j < k; ++j) repeated.insert(repeated.end(), x.begin(), x.end());
  Simulator<P> small(ring(m), protocol, x);
  Simulator<P> large(ring(k * m), protocol, repeated);

  OracleReport report;
  report.expected = "S_i(t) = S_{i+jm}(t)";
  auto compare = [&]() {
    for (NodeId i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (!(small.configuration().nodes[i] == large.configuration().nodes[i + j * m])) {
          report.violations.push_back("node " + std::to_string(i) + " differs from replica " +
                                      std::to_string(i + j * m) + " at round " + std::to_string(small.round()));
          return false;
        }
      }
    }
    return true;
  };
  bool ok = compare();
  while (ok && report.rounds < max_rounds) {
    const bool a = small.step();
    const bool b = large.step();
    ++report.rounds;
    ok = compare();
    if (a && b) {
      report.quiescent = true;
      break;
    }
  }
  report.agree = ok;
  report.observed = ok ? report.expected : report.violations.front();
  return report;
}

}  // namespace anoncomp
