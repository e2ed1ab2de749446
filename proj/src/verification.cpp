#include "anoncomp/verification.hpp"

#include <algorithm>
#include <numeric>

namespace anoncomp {

namespace {

void check_values(std::span<const int> x, int alphabet_max) {
  if (x.empty()) throw std::invalid_argument("oracle needs at least one value");
  for (int v : x) {
    if (v < 0 || v > alphabet_max) {
      throw std::invalid_argument("value " + std::to_string(v) + " outside 0.." + std::to_string(alphabet_max));
    }
  }
}

// Caps the violation log so a broken run does not produce megabytes.
void note(OracleReport& report, std::string line) {
  if (report.violations.size() < 8) report.violations.push_back(std::move(line));
}

}  // namespace

IntervalValue oracle_average(std::span<const int> x, int alphabet_max) {
  check_values(x, alphabet_max);
  const std::int64_t sum = std::accumulate(x.begin(), x.end(), std::int64_t{0});
  const Rational mean(sum, static_cast<std::int64_t>(x.size()));
  const std::int64_t lower = floor(mean);
  return mean == Rational(lower) ? IntervalValue::point(static_cast<int>(lower))
                                 : IntervalValue::between(static_cast<int>(lower));
}

ProportionVector oracle_proportions(std::span<const int> x, int alphabet_max) {
  check_values(x, alphabet_max);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(alphabet_max) + 1, 0);
  for (int v : x) ++counts[v];
  ProportionVector p;
  for (auto c : counts) p.p.emplace_back(c, static_cast<std::int64_t>(x.size()));
  return p;
}

std::size_t oracle_evaluate(const LevelSetSpec& spec, const ProportionVector& p) {
  const auto level = first_match(spec, p);
  if (!level) throw CoverageError("no level matches proportion vector " + to_string(p));
  return *level;
}

std::size_t least_integral_multiple(const Rational& p) { return static_cast<std::size_t>(p.denominator()); }

std::string output_text(const std::optional<IntervalValue>& y) { return y ? to_string(*y) : "-"; }

std::string output_text(const std::optional<FrequencyReadout>& y) {
  if (!y) return "-";
  return to_string(y->value()) + " m=" + std::to_string(y->m);
}

OracleReport audit_averaging(const PortLabeledGraph& graph, std::span<const int> x, const AvgParams& params,
                             const RunOptions& options) {
  OracleReport report;
  report.expected = to_string(oracle_average(x, params.q_cap));
  const std::int64_t total = std::accumulate(x.begin(), x.end(), std::int64_t{0});
  Simulator<AveragingProtocol> sim(graph, AveragingProtocol(params), x, options.execution);
  try {
    while (report.rounds < options.max_rounds) {
      const bool fixed = sim.step();
      ++report.rounds;
      const std::int64_t held = pebble_total(sim.configuration());
      if (held != total) {
        note(report, "round " + std::to_string(sim.round()) + ": " + std::to_string(held) + " pebbles, expected " +
                         std::to_string(total));
      }
      if (fixed) {
        report.quiescent = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    note(report, "round " + std::to_string(sim.round() + 1) + ": " + e.what());
  }

  const auto& nodes = sim.configuration().nodes;
  std::vector<std::optional<IntervalValue>> outputs;
  for (const auto& node : nodes) outputs.push_back(node.y);
  report.observed = consensus_text(outputs, [](const auto& y) { return output_text(y); });

  if (!report.quiescent) {
    note(report, "no quiescence within " + std::to_string(options.max_rounds) + " rounds");
  } else {
    int lo = nodes.front().z->u;
    int hi = lo;
    for (const auto& node : nodes) {
      lo = std::min(lo, node.z->u);
      hi = std::max(hi, node.z->u);
    }
    if (hi - lo > 1) note(report, "final spread " + std::to_string(hi - lo) + " exceeds 1");
    std::vector<TrackerState> max_states;
    std::vector<TrackerState> min_states;
    for (const auto& node : nodes) {
      max_states.push_back(node.z->max_tracker);
      min_states.push_back(node.z->min_tracker);
    }
    try {
      for (NodeId i = 0; i < graph.size(); ++i) {
        pointer_chain(graph, max_states, i);
        pointer_chain(graph, min_states, i);
      }
    } catch (const std::exception& e) {
      note(report, e.what());
    }
  }
  report.agree = report.expected == report.observed;
  return report;
}

OracleReport audit_tracker(const PortLabeledGraph& graph, std::span<const int> initial,
                           std::span<const InputChange> changes, const TrackerParams& params,
                           const RunOptions& options) {
  OracleReport report;
  TrackerRun run;
  try {
    run = run_tracker(graph, initial, changes, params, options);
  } catch (const std::exception& e) {
    note(report, e.what());
    return report;
  }
  report.rounds = run.result.rounds;
  report.quiescent = run.result.quiescent;
  report.expected = std::to_string(run.truth);
  std::vector<int> estimates;
  for (const auto& s : run.states) estimates.push_back(s.estimate);
  report.observed = consensus_text(estimates, [](int v) { return std::to_string(v); });
  report.agree = report.expected == report.observed;
  if (!report.quiescent) note(report, "no quiescence within " + std::to_string(options.max_rounds) + " rounds");
  for (NodeId i = 0; i < graph.size(); ++i) {
    try {
      const NodeId root = pointer_chain(graph, run.states, i);
      if (run.states[root].u != run.truth) {
        note(report, "pointer chain from node " + std::to_string(i) + " ends at node " + std::to_string(root) +
                         " holding " + std::to_string(run.states[root].u));
      }
    } catch (const std::exception& e) {
      note(report, e.what());
    }
  }
  return report;
}

OracleReport audit_compiled(const PortLabeledGraph& graph, std::span<const int> x, const CompiledProtocol& protocol,
                            const RunOptions& options) {
  OracleReport report;
  const LevelSetSpec& spec = protocol.spec();
  report.expected = protocol.label(oracle_evaluate(spec, oracle_proportions(x, spec.alphabet_max)));

  std::vector<std::int64_t> totals;
  for (const auto& cmp : protocol.comparisons()) {
    std::int64_t t = 0;
    for (int v : x) t += encode_local(v, cmp);
    totals.push_back(t);
  }
  Simulator<CompiledProtocol> sim(graph, protocol, x, options.execution);
  try {
    while (report.rounds < options.max_rounds) {
      const bool fixed = sim.step();
      ++report.rounds;
      for (std::size_t c = 0; c < totals.size(); ++c) {
        const std::int64_t held = pebble_total(sim.configuration(), protocol, c);
        if (held != totals[c]) {
          note(report, "round " + std::to_string(sim.round()) + ", comparison " + std::to_string(c) + ": " +
                           std::to_string(held) + " pebbles, expected " + std::to_string(totals[c]));
        }
      }
      if (fixed) {
        report.quiescent = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    note(report, "round " + std::to_string(sim.round() + 1) + ": " + e.what());
  }
  std::vector<CompiledProtocol::Output> outputs;
  for (const auto& node : sim.configuration().nodes) outputs.push_back(node.y);
  report.observed =
      consensus_text(outputs, [&](const auto& y) { return y ? protocol.label(*y) : std::string("-"); });
  if (!report.quiescent) note(report, "no quiescence within " + std::to_string(options.max_rounds) + " rounds");
  report.agree = report.expected == report.observed;
  return report;
}

OracleReport audit_frequency(const PortLabeledGraph& graph, std::span<const int> x, const FrequencyParams& params,
                             const RunOptions& options) {
  OracleReport report;
  if (x.empty()) throw std::invalid_argument("oracle needs at least one value");
  const auto hits = std::count(x.begin(), x.end(), params.target);
  const Rational p(hits, static_cast<std::int64_t>(x.size()));
  // the least m with m*p integral is p's reduced denominator, where m*p = numerator
  report.expected = output_text(FrequencyReadout{least_integral_multiple(p), p.numerator()});
  Simulator<FrequencyProtocol> sim(graph, FrequencyProtocol(params), x, options.execution);
  try {
    while (report.rounds < options.max_rounds) {
      const bool settled = sim.step();
      ++report.rounds;
      if (settled) {
        report.quiescent = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    note(report, "round " + std::to_string(sim.round() + 1) + ": " + e.what());
  }
  std::vector<std::optional<FrequencyReadout>> outputs;
  for (const auto& node : sim.configuration().nodes) outputs.push_back(node.y);
  report.observed = consensus_text(outputs, [](const auto& y) { return output_text(y); });
  if (!report.quiescent) note(report, "not settled within " + std::to_string(options.max_rounds) + " rounds");
  report.agree = report.expected == report.observed;
  return report;
}

}  // namespace anoncomp
