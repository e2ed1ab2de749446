// anoncomp: run, sweep and check scenarios for the anonymous-network protocols.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "anoncomp/graph.hpp"
#include "anoncomp/scenario.hpp"

namespace fs = std::filesystem;
using namespace anoncomp;

namespace {

struct Common {
  std::string file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_rounds;
  std::string out_dir;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ScenarioError("cannot write " + path.string());
  out << text;
}

Scenario load(const Common& c) {
  Scenario sc = load_scenario(c.file);
  if (c.seed) sc.seed = *c.seed;
  if (c.max_rounds) {
    if (*c.max_rounds == 0) throw ScenarioError("--max-rounds must be positive");
    sc.max_rounds = *c.max_rounds;
  }
  return sc;
}

template <class T>
std::vector<T> range_of(const std::string& text) {
  std::vector<T> values;
  if (text.empty()) return values;
  for (auto v : parse_range(text)) {
    if (v < 0) throw ScenarioError("negative value in range '" + text + "'");
    values.push_back(static_cast<T>(v));
  }
  return values;
}

int cmd_run(const Common& c, const std::string& trace) {
  Scenario sc = load(c);
  if (trace == "full") {
    sc.trace = TraceLevel::full;
  } else if (trace == "outputs") {
    sc.trace = TraceLevel::outputs;
  } else if (trace == "none") {
    sc.trace = TraceLevel::none;
  } else if (!trace.empty()) {
    throw ScenarioError("--trace expects outputs or full");
  }
  const ScenarioResult result = run_scenario(sc);
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_file(fs::path(c.out_dir) / (sc.name + ".summary.txt"), result.summary);
    if (sc.trace != TraceLevel::none) write_file(fs::path(c.out_dir) / (sc.name + ".trace.txt"), result.trace);
    std::cout << result.summary;
  } else {
    std::cout << result.summary;
    if (sc.trace != TraceLevel::none) std::cout << "trace:\n" << result.trace;
  }
  if (result.exit_code != exit_ok) std::cerr << "anoncomp: " << result.diagnostic << '\n';
  return result.exit_code;
}

int cmd_sweep(const Common& c, const std::map<std::string, std::string>& r) {
  const Scenario sc = load(c);
  SweepRanges ranges;
  ranges.n = range_of<std::size_t>(r.at("n"));
  ranges.seeds = range_of<std::uint64_t>(r.at("seeds"));
  ranges.alphabet = range_of<int>(r.at("K"));
  ranges.h_max = range_of<int>(r.at("h_max"));
  ranges.max_rounds = range_of<std::size_t>(r.at("rounds"));
  ranges.replicate = range_of<std::size_t>(r.at("k"));
  const SweepReport report = sweep(sc, ranges);
  const std::string text = report.text();
  if (!c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    write_file(fs::path(c.out_dir) / (sc.name + ".sweep.txt"), text);
  }
  std::cout << text;
  return report.failed == 0 ? exit_ok : exit_oracle;
}

int cmd_verify(const Common& c) {
  std::cout << oracle_summary(load(c));
  return exit_ok;
}

int cmd_gen_graph(const std::vector<std::string>& words, std::uint64_t seed) {
  std::string text;
  for (const auto& w : words) text += w + " ";
  std::cout << to_text(build_graph(parse_graph_spec(text), seed));
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for anonymous port-labeled networks"};
  app.require_subcommand(1);

  Common common;
  std::string trace;
  auto* run = app.add_subcommand("run", "Run a scenario and check it against its oracle");
  run->add_option("file", common.file, "Scenario file")->required();
  run->add_flag("--trace{outputs}", trace, "Round-by-round trace: --trace or --trace=full");
  run->add_option("--seed", common.seed, "Override the scenario seed");
  run->add_option("--max-rounds", common.max_rounds, "Override the round limit");
  run->add_option("--out", common.out_dir, "Write summary and trace files here");

  std::map<std::string, std::string> ranges{{"n", ""}, {"seeds", ""}, {"K", ""},
                                            {"h_max", ""}, {"rounds", ""}, {"k", ""}};
  auto* sw = app.add_subcommand("sweep", "Run a scenario over parameter ranges");
  sw->add_option("file", common.file, "Base scenario file")->required();
  sw->add_option("--n", ranges["n"], "Node counts, lo..hi or a,b,c");
  sw->add_option("--seeds", ranges["seeds"], "Seeds");
  sw->add_option("--K", ranges["K"], "Alphabet bounds");
  sw->add_option("--h-max", ranges["h_max"], "Hop caps");
  sw->add_option("--rounds", ranges["rounds"], "Round limits");
  sw->add_option("--replicate", ranges["k"], "Replication factors (ring base graphs)");
  sw->add_option("--seed", common.seed, "Base seed");
  sw->add_option("--max-rounds", common.max_rounds, "Round limit");
  sw->add_option("--out", common.out_dir, "Write the report here");

  auto* verify = app.add_subcommand("verify", "Print the oracle's expected output only");
  verify->add_option("file", common.file, "Scenario file")->required();
  verify->add_option("--seed", common.seed, "Override the scenario seed");

  std::vector<std::string> graph_words;
  std::uint64_t graph_seed = 1;
  auto* gen = app.add_subcommand("gen-graph", "Print a port table, e.g. gen-graph random 10 5");
  gen->add_option("spec", graph_words, "Graph description")->required();
  gen->add_option("--seed", graph_seed, "Seed for random graphs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*run) {
      return cmd_run(common, trace);
    }
    if (*sw) return cmd_sweep(common, ranges);
    if (*verify) return cmd_verify(common);
    if (*gen) return cmd_gen_graph(graph_words, graph_seed);
  } catch (const std::exception& e) {
    std::cerr << "anoncomp: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
