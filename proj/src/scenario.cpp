#include "anoncomp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "anoncomp/averaging.hpp"
#include "anoncomp/compiler.hpp"
#include "anoncomp/detail/print.hpp"
#include "anoncomp/detail/random.hpp"
#include "anoncomp/frequency.hpp"

namespace anoncomp {

namespace {

std::vector<std::string> words(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

template <class T>
T number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(what);
    return static_cast<T>(v);
  } catch (const std::exception&) {
    throw ScenarioError("bad " + what + " '" + text + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

GraphSpec parse_graph_spec(std::string_view text) {
  const auto w = words(text);
  if (w.empty()) throw ScenarioError("empty graph description");
  GraphSpec spec;
  spec.kind = w[0];
  auto arg = [&](std::size_t i, const char* what) -> std::size_t {
    if (i >= w.size()) throw ScenarioError("graph " + spec.kind + " needs " + what);
    return number<std::size_t>(w[i], what);
  };
  if (spec.kind == "ring" || spec.kind == "complete" || spec.kind == "path" || spec.kind == "explicit") {
    spec.n = arg(1, "a node count");
    if (w.size() > 2) throw ScenarioError("trailing text after graph " + spec.kind);
  } else if (spec.kind == "star") {
    spec.n = arg(1, "a leaf count") + 1;
    if (w.size() > 2) throw ScenarioError("trailing text after graph star");
  } else if (spec.kind == "random") {
    spec.n = arg(1, "a node count");
    spec.extra = arg(2, "an extra-edge count");
    if (w.size() > 3) spec.seed = number<std::uint64_t>(w[3], "graph seed");
    if (w.size() > 4) throw ScenarioError("trailing text after graph random");
  } else {
    throw ScenarioError("unknown graph kind '" + spec.kind + "'");
  }
  return spec;
}

PortLabeledGraph build_graph(const GraphSpec& spec, std::uint64_t default_seed) {
  if (spec.kind == "ring") return ring(spec.n);
  if (spec.kind == "complete") return complete(spec.n);
  if (spec.kind == "path") return path(spec.n);
  if (spec.kind == "star") return star(spec.n - 1);
  if (spec.kind == "random") return random_connected(spec.n, spec.extra, spec.seed.value_or(default_seed));
  if (spec.kind == "explicit") {
    if (!spec.table.empty()) {
      if (spec.table.size() != spec.n) {
        throw GraphError("port table lists " + std::to_string(spec.table.size()) + " nodes, expected " +
                         std::to_string(spec.n));
      }
      return PortLabeledGraph(spec.table);
    }
    return from_edges(spec.n, spec.edges);
  }
  throw ScenarioError("unknown graph kind '" + spec.kind + "'");
}

std::string protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::average: return "average";
    case ProtocolKind::max_track: return "max_track";
    case ProtocolKind::min_track: return "min_track";
    case ProtocolKind::frequency: return "frequency";
    case ProtocolKind::compiled: return "compiled";
  }
  return "?";
}

Scenario parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
  Scenario sc;
  sc.base_dir = base_dir;
  bool have_graph = false;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  std::vector<std::optional<std::vector<PortEdge>>> table;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto w = words(line);
    if (w.empty()) continue;
    const std::string key = w[0];
    try {
      auto one = [&](const char* what) -> const std::string& {
        if (w.size() != 2) throw ScenarioError(key + " expects " + what);
        return w[1];
      };
      if (key == "name") {
        sc.name = one("a name");
      } else if (key == "graph") {
        sc.graph = parse_graph_spec(line.substr(line.find("graph") + 5));
        have_graph = true;
      } else if (key == "edge") {
        if (w.size() != 3 && w.size() != 5) throw ScenarioError("edge expects 'a b' or 'a b port_a port_b'");
        Edge e{number<NodeId>(w[1], "node"), number<NodeId>(w[2], "node"), 0, 0};
        if (w.size() == 5) {
          e.port_a = number<Port>(w[3], "port");
          e.port_b = number<Port>(w[4], "port");
        }
        sc.graph.edges.push_back(e);
      } else if (key == "node") {
        // node i: j/r j/r ...
        if (w.size() < 2 || w[1].back() != ':') throw ScenarioError("node expects 'node i: neighbor/port ...'");
        const auto id = number<NodeId>(w[1].substr(0, w[1].size() - 1), "node");
        if (table.size() <= id) table.resize(id + 1);
        if (table[id]) throw ScenarioError("node " + std::to_string(id) + " listed twice");
        std::vector<PortEdge> row;
        for (std::size_t i = 2; i < w.size(); ++i) {
          const auto slash = w[i].find('/');
          if (slash == std::string::npos) throw ScenarioError("port entry '" + w[i] + "' is not neighbor/port");
          row.push_back({number<NodeId>(w[i].substr(0, slash), "neighbor"),
                         number<Port>(w[i].substr(slash + 1), "reverse port")});
        }
        table[id] = std::move(row);
      } else if (key == "alphabet") {
        sc.alphabet = number<int>(one("K"), "alphabet");
      } else if (key == "values") {
        sc.values.clear();
        if (w.size() == 2 && w[1] == "random") continue;
        for (std::size_t i = 1; i < w.size(); ++i) sc.values.push_back(number<int>(w[i], "value"));
        if (sc.values.empty()) throw ScenarioError("values expects a list or 'random'");
      } else if (key == "seed") {
        sc.seed = number<std::uint64_t>(one("a seed"), "seed");
      } else if (key == "protocol") {
        const std::string& p = one("a protocol");
        if (p == "average") {
          sc.protocol = ProtocolKind::average;
        } else if (p == "max_track") {
          sc.protocol = ProtocolKind::max_track;
        } else if (p == "min_track") {
          sc.protocol = ProtocolKind::min_track;
        } else if (p == "frequency") {
          sc.protocol = ProtocolKind::frequency;
        } else if (p == "compiled") {
          sc.protocol = ProtocolKind::compiled;
        } else {
          throw ScenarioError("unknown protocol '" + p + "'");
        }
      } else if (key == "spec") {
        sc.spec_path = one("a path");
      } else if (key == "change") {
        if (w.size() != 4) throw ScenarioError("change expects 'round node value'");
        sc.changes.push_back({number<std::size_t>(w[1], "round"), number<NodeId>(w[2], "node"),
                              number<int>(w[3], "value")});
        if (sc.changes.back().round == 0) throw ScenarioError("changes start at round 1");
      } else if (key == "max_rounds") {
        sc.max_rounds = number<std::size_t>(one("a count"), "max_rounds");
        if (sc.max_rounds == 0) throw ScenarioError("max_rounds must be positive");
      } else if (key == "h_max") {
        const std::string& v = one("auto or a count");
        sc.h_max = v == "auto" ? std::nullopt : std::optional<int>(number<int>(v, "h_max"));
        if (sc.h_max && *sc.h_max < 1) throw ScenarioError("h_max must be positive");
      } else if (key == "m_max") {
        const std::string& v = one("auto or a count");
        sc.m_max = v == "auto" ? std::nullopt : std::optional<std::size_t>(number<std::size_t>(v, "m_max"));
        if (sc.m_max && *sc.m_max < 1) throw ScenarioError("m_max must be positive");
      } else if (key == "target") {
        sc.target = number<int>(one("a value"), "target");
      } else if (key == "oracle") {
        const std::string& v = one("on or off");
        if (v != "on" && v != "off") throw ScenarioError("oracle expects on or off");
        sc.oracle = v == "on";
      } else if (key == "trace") {
        const std::string& v = one("none, outputs or full");
        if (v == "none") {
          sc.trace = TraceLevel::none;
        } else if (v == "outputs") {
          sc.trace = TraceLevel::outputs;
        } else if (v == "full") {
          sc.trace = TraceLevel::full;
        } else {
          throw ScenarioError("trace expects none, outputs or full");
        }
      } else {
        throw ScenarioError("unknown key '" + key + "'");
      }
    } catch (const ScenarioError& e) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_graph) throw ScenarioError("scenario has no graph line");
  if (!table.empty()) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table[i]) throw ScenarioError("port table has no row for node " + std::to_string(i));
      sc.graph.table.push_back(*table[i]);
    }
  }
  if ((!sc.graph.edges.empty() || !sc.graph.table.empty()) && sc.graph.kind != "explicit") {
    throw ScenarioError("edge and node lines need 'graph explicit N'");
  }
  if (sc.protocol == ProtocolKind::compiled && sc.spec_path.empty()) {
    throw ScenarioError("compiled protocol needs a spec line");
  }
  if (sc.alphabet < 1) throw ScenarioError("alphabet must be at least 1");
  for (int v : sc.values) {
    if (v > sc.alphabet) throw ScenarioError("value " + std::to_string(v) + " outside alphabet");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

namespace {

struct Prepared {
  PortLabeledGraph graph;
  std::vector<int> x;
  int h_max = 1;
  std::optional<LevelSetSpec> spec;
};

LevelSetSpec load_spec(const Scenario& sc) {
  const std::filesystem::path path = sc.base_dir / sc.spec_path;
  LevelSetSpec spec = parse_level_set_spec(read_file(path));
  if (spec.alphabet_max != sc.alphabet) {
    throw ScenarioError("spec alphabet " + std::to_string(spec.alphabet_max) + " differs from scenario alphabet " +
                        std::to_string(sc.alphabet));
  }
  return spec;
}

Prepared prepare(const Scenario& sc) {
  Prepared p;
  p.graph = build_graph(sc.graph, sc.seed);
  if (sc.protocol == ProtocolKind::compiled) p.spec = load_spec(sc);
  const int lo = p.spec ? p.spec->min_value : 0;
  if (sc.values.empty()) {
    std::mt19937_64 rng(sc.seed ^ 0x5bd1e995u);
    for (std::size_t i = 0; i < p.graph.size(); ++i) {
      p.x.push_back(lo + static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(sc.alphabet - lo + 1))));
    }
  } else {
    if (sc.values.size() != p.graph.size()) {
      throw ScenarioError(std::to_string(sc.values.size()) + " values for " + std::to_string(p.graph.size()) +
                          " nodes");
    }
    p.x = sc.values;
    for (int v : p.x) {
      if (v < lo) throw ScenarioError("value " + std::to_string(v) + " below the spec support");
    }
  }
  p.h_max = sc.h_max.value_or(static_cast<int>(p.graph.size()));
  return p;
}

template <Protocol P>
struct Driven {
  Configuration<P> final;
  bool quiescent = false;
  std::size_t rounds = 0;
  std::string trace;
  std::string violation;
};

template <Protocol P, class Hook, class Check, class OutText>
Driven<P> drive(const PortLabeledGraph& graph, const P& protocol, std::span<const typename P::Input> x,
                const Scenario& sc, Hook hook, Check check, OutText out_text) {
  Simulator<P> sim(graph, protocol, x);
  Driven<P> run;
  std::ostringstream trace;
  auto record = [&]() {
    if (sc.trace == TraceLevel::none) return;
    const auto& config = sim.configuration();
    trace << "t=" << config.round;
    for (NodeId i = 0; i < config.nodes.size(); ++i) {
      const auto& node = config.nodes[i];
      trace << " | " << i << ": y=" << out_text(node.y);
      if (sc.trace == TraceLevel::full) {
        trace << " z=" << detail::text(node.z) << " out=" << detail::text(node.out);
      }
    }
    trace << '\n';
  };
  record();
  while (sim.round() < sc.max_rounds) {
    bool fixed = false;
    bool pending = false;
    try {
      pending = hook(sim.configuration());
      fixed = sim.step();
    } catch (const std::exception& e) {
      run.violation = "round " + std::to_string(sim.round() + 1) + ": " + e.what();
      break;
    }
    record();
    if (auto broken = check(sim.configuration())) {
      run.violation = "round " + std::to_string(sim.round()) + ": " + *broken;
      break;
    }
    if (fixed && !pending) {
      run.quiescent = true;
      break;
    }
  }
  run.rounds = sim.round();
  run.final = sim.configuration();
  run.trace = trace.str();
  return run;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " " : "") + items[i];
  return out;
}

std::string join_ints(std::span<const int> items) {
  std::vector<std::string> text;
  for (int v : items) text.push_back(std::to_string(v));
  return join(text);
}

struct Outcome {
  std::size_t rounds = 0;
  bool quiescent = false;
  std::string trace;
  std::string violation;
  std::vector<std::string> outputs;
  std::vector<std::string> extra;  // additional summary lines
  std::string expected;
};

template <class Run>
void take(Outcome& out, Run& run) {
  out.rounds = run.rounds;
  out.quiescent = run.quiescent;
  out.trace = std::move(run.trace);
  out.violation = std::move(run.violation);
}

Outcome execute(const Scenario& sc, const Prepared& p) {
  Outcome out;
  const auto no_check = [](const auto&) { return std::optional<std::string>{}; };
  switch (sc.protocol) {
    case ProtocolKind::average: {
      const AvgParams params{sc.alphabet, p.h_max};
      const std::int64_t total = std::accumulate(p.x.begin(), p.x.end(), std::int64_t{0});
      auto check = [&](const Configuration<AveragingProtocol>& config) -> std::optional<std::string> {
        const std::int64_t held = pebble_total(config);
        if (held == total) return std::nullopt;
        return "pebble conservation broken: " + std::to_string(held) + " held, " + std::to_string(total) + " issued";
      };
      auto run = drive(p.graph, AveragingProtocol(params), std::span<const int>(p.x), sc, NoInputChanges{}, check,
                       [](const auto& y) { return output_text(y); });
      take(out, run);
      std::vector<int> u;
      for (const auto& node : run.final.nodes) u.push_back(node.z ? node.z->u : node.x);
      for (const auto& node : run.final.nodes) out.outputs.push_back(output_text(node.y));
      out.extra.push_back("pebbles: " + join_ints(u));
      if (out.violation.empty() && out.quiescent) {
        const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
        if (*hi - *lo > 1) out.violation = "final spread " + std::to_string(*hi - *lo) + " exceeds 1";
      }
      out.expected = to_string(oracle_average(p.x, sc.alphabet));
      break;
    }
    case ProtocolKind::max_track:
    case ProtocolKind::min_track: {
      const Extremum order = sc.protocol == ProtocolKind::max_track ? Extremum::max : Extremum::min;
      const ScheduledInputs hook(sc.changes);
      auto run = drive(p.graph, TrackerProtocol(TrackerParams{p.h_max, order}), std::span<const int>(p.x), sc, hook,
                       no_check, [](const auto& y) { return detail::text(y); });
      take(out, run);
      std::vector<TrackerState> states;
      for (const auto& node : run.final.nodes) {
        states.push_back(node.z.value_or(tracker_init(node.x)));
        out.outputs.push_back(detail::text(node.y));
      }
      const auto inputs = hook.final_inputs(p.x);
      const int truth = order == Extremum::max ? *std::max_element(inputs.begin(), inputs.end())
                                               : *std::min_element(inputs.begin(), inputs.end());
      std::vector<std::string> roots;
      for (NodeId i = 0; i < p.graph.size() && out.violation.empty(); ++i) {
        try {
          const NodeId root = pointer_chain(p.graph, states, i);
          roots.push_back(std::to_string(root));
        } catch (const std::exception& e) {
          out.violation = e.what();
        }
      }
      out.extra.push_back("chain ends: " + join(roots));
      out.expected = std::to_string(truth);
      break;
    }
    case ProtocolKind::frequency: {
      const FrequencyParams params{sc.target, sc.m_max.value_or(p.graph.size()), p.h_max};
      auto run = drive(p.graph, FrequencyProtocol(params), std::span<const int>(p.x), sc, NoInputChanges{}, no_check,
                       [](const auto& y) { return output_text(y); });
      take(out, run);
      for (const auto& node : run.final.nodes) out.outputs.push_back(output_text(node.y));
      const auto hits = std::count(p.x.begin(), p.x.end(), sc.target);
      const Rational share(hits, static_cast<std::int64_t>(p.x.size()));
      out.expected = output_text(FrequencyReadout{least_integral_multiple(share), share.numerator()});
      break;
    }
    case ProtocolKind::compiled: {
      const CompiledProtocol protocol = compile(*p.spec, p.h_max);
      std::vector<std::int64_t> totals;
      for (const auto& cmp : protocol.comparisons()) {
        std::int64_t t = 0;
        for (int v : p.x) t += encode_local(v, cmp);
        totals.push_back(t);
      }
      auto check = [&](const Configuration<CompiledProtocol>& config) -> std::optional<std::string> {
        for (std::size_t c = 0; c < totals.size(); ++c) {
          const std::int64_t held = pebble_total(config, protocol, c);
          if (held != totals[c]) {
            return "pebble conservation broken in comparison " + std::to_string(c) + ": " + std::to_string(held) +
                   " held, " + std::to_string(totals[c]) + " issued";
          }
        }
        return std::nullopt;
      };
      auto label = [&](const CompiledProtocol::Output& y) { return y ? protocol.label(*y) : std::string("-"); };
      auto run = drive(p.graph, protocol, std::span<const int>(p.x), sc, NoInputChanges{}, check, label);
      take(out, run);
      for (const auto& node : run.final.nodes) out.outputs.push_back(label(node.y));
      out.extra.push_back("comparisons: " + std::to_string(protocol.comparisons().size()));
      out.expected = protocol.label(oracle_evaluate(*p.spec, oracle_proportions(p.x, sc.alphabet)));
      break;
    }
  }
  return out;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc) {
  ScenarioResult result;
  Prepared p;
  Outcome out;
  try {
    p = prepare(sc);
    out = execute(sc, p);
  } catch (const std::exception& e) {
    // graph, spec and coverage errors all surface before the first round
    result.exit_code = exit_usage;
    result.diagnostic = e.what();
    result.summary = "scenario: " + sc.name + "\nstatus: error\ndiagnostic: " + result.diagnostic + "\n";
    return result;
  }

  OracleReport& report = result.report;
  report.rounds = out.rounds;
  report.quiescent = out.quiescent;
  report.expected = out.expected;
  bool same = true;
  for (const auto& o : out.outputs) same = same && o == out.outputs.front();
  report.observed = same ? out.outputs.front() : "[" + join(out.outputs) + "]";
  report.agree = report.expected == report.observed;
  if (!out.violation.empty()) report.violations.push_back(out.violation);
  if (!out.quiescent && out.violation.empty()) {
    report.violations.push_back("no quiescence within " + std::to_string(sc.max_rounds) + " rounds");
  }

  if (!out.violation.empty()) {
    result.exit_code = exit_invariant;
    result.diagnostic = out.violation;
  } else if (sc.oracle && !report.agree) {
    result.exit_code = exit_oracle;
    result.diagnostic = "oracle expected " + report.expected + ", nodes output " + report.observed;
  } else if (sc.oracle && !out.quiescent) {
    result.exit_code = exit_oracle;
    result.diagnostic = report.violations.front();
  }

  std::ostringstream os;
  os << "scenario: " << sc.name << '\n';
  os << "protocol: " << protocol_name(sc.protocol);
  if (sc.protocol == ProtocolKind::compiled) os << " (" << sc.spec_path << ')';
  os << '\n';
  os << "graph: " << sc.graph.kind << ", " << p.graph.size() << " nodes, " << p.graph.port_count() / 2 << " edges\n";
  os << "values: " << join_ints(p.x) << '\n';
  os << "h_max: " << p.h_max << '\n';
  os << "rounds: " << out.rounds << '\n';
  os << "quiescent: " << (out.quiescent ? "yes" : "no") << '\n';
  os << "outputs: " << join(out.outputs) << '\n';
  for (const auto& line : out.extra) os << line << '\n';
  if (sc.oracle) {
    os << "oracle: expected " << report.expected << ", " << (report.agree ? "agree" : "DISAGREE") << '\n';
  } else {
    os << "oracle: off\n";
  }
  os << "status: " << (result.exit_code == exit_ok ? "ok" : "FAIL") << '\n';
  if (!result.diagnostic.empty()) os << "diagnostic: " << result.diagnostic << '\n';
  result.summary = os.str();
  result.trace = std::move(out.trace);
  return result;
}

std::string oracle_summary(const Scenario& sc) {
  const Prepared p = prepare(sc);
  std::ostringstream os;
  os << "scenario: " << sc.name << '\n';
  os << "values: " << join_ints(p.x) << '\n';
  switch (sc.protocol) {
    case ProtocolKind::average:
      os << "expected: " << oracle_average(p.x, sc.alphabet) << '\n';
      break;
    case ProtocolKind::max_track:
    case ProtocolKind::min_track: {
      const auto inputs = ScheduledInputs(sc.changes).final_inputs(p.x);
      const bool max = sc.protocol == ProtocolKind::max_track;
      os << "expected: " << (max ? *std::max_element(inputs.begin(), inputs.end())
                                 : *std::min_element(inputs.begin(), inputs.end()))
         << '\n';
      break;
    }
    case ProtocolKind::frequency: {
      const auto hits = std::count(p.x.begin(), p.x.end(), sc.target);
      os << "expected: " << to_string(Rational(hits, static_cast<std::int64_t>(p.x.size()))) << '\n';
      break;
    }
    case ProtocolKind::compiled: {
      const ProportionVector prop = oracle_proportions(p.x, sc.alphabet);
      const ValidationReport v = validate(*p.spec);
      os << "proportions: " << to_string(prop) << '\n';
      os << "spec: " << v.points_checked << " points checked, " << v.uncovered.size() << " uncovered, "
         << v.overlaps.size() << " overlapping\n";
      os << "expected: " << p.spec->levels[oracle_evaluate(*p.spec, prop)].label << '\n';
      break;
    }
  }
  return os.str();
}

}  // namespace anoncomp
