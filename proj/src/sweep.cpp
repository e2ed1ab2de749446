#include <random>
#include <sstream>

#include "anoncomp/compiler.hpp"
#include "anoncomp/detail/random.hpp"
#include "anoncomp/frequency.hpp"
#include "anoncomp/scenario.hpp"

namespace anoncomp {

std::vector<std::int64_t> parse_range(std::string_view text) {
  auto to_int = [&](std::string_view s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(std::string(s), &used);
      if (used != s.size()) throw std::invalid_argument("range");
      return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
      throw ScenarioError("bad range '" + std::string(text) + "'");
    }
  };
  std::vector<std::int64_t> values;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const auto lo = to_int(text.substr(0, dots));
    const auto hi = to_int(text.substr(dots + 2));
    if (hi < lo) throw ScenarioError("empty range '" + std::string(text) + "'");
    for (auto v = lo; v <= hi; ++v) values.push_back(v);
    return values;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    values.push_back(to_int(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return values;
}

std::string SweepReport::text() const {
  std::ostringstream os;
  for (const auto& run : runs) {
    os << run.label << ": " << (run.passed ? "pass" : "FAIL") << " rounds=" << run.rounds;
    if (!run.diagnostic.empty()) os << " (" << run.diagnostic << ')';
    os << '\n';
  }
  os << "total: " << runs.size() << " runs, " << passed << " passed, " << failed << " failed, max rounds "
     << max_rounds << '\n';
  return os.str();
}

namespace {

struct Point {
  Scenario scenario;
  std::size_t k = 0;
  std::string label;
};

template <class T>
std::vector<std::optional<T>> axis(const std::vector<T>& range) {
  if (range.empty()) return {std::nullopt};
  return {range.begin(), range.end()};
}

SweepRun replicate(const Point& point) {
  const Scenario& sc = point.scenario;
  SweepRun run{point.label, false, 0, {}};
  const std::size_t m = sc.graph.n;
  std::vector<int> x = sc.values;
  if (x.size() != m) {
    x.clear();
    std::mt19937_64 rng(sc.seed ^ 0x5bd1e995u);
    for (std::size_t i = 0; i < m; ++i) {
      x.push_back(static_cast<int>(detail::uniform_below(rng, static_cast<std::uint64_t>(sc.alphabet) + 1)));
    }
  }
  const int h_max = sc.h_max.value_or(static_cast<int>(point.k * m));
  OracleReport report;
  switch (sc.protocol) {
    case ProtocolKind::average:
      report = check_replication(AveragingProtocol(AvgParams{sc.alphabet, h_max}), std::span<const int>(x), point.k,
                                 sc.max_rounds);
      break;
    case ProtocolKind::max_track:
    case ProtocolKind::min_track: {
      const Extremum order = sc.protocol == ProtocolKind::max_track ? Extremum::max : Extremum::min;
      report = check_replication(TrackerProtocol(TrackerParams{h_max, order}), std::span<const int>(x), point.k,
                                 sc.max_rounds);
      break;
    }
    case ProtocolKind::frequency: {
      const FrequencyParams params{sc.target, sc.m_max.value_or(point.k * m), h_max};
      report = check_replication(FrequencyProtocol(params), std::span<const int>(x), point.k, sc.max_rounds);
      break;
    }
    case ProtocolKind::compiled:
      throw ScenarioError("replication sweeps support average, max_track, min_track and frequency");
  }
  run.passed = report.passed() && report.quiescent;
  run.rounds = report.rounds;
  if (!report.violations.empty()) {
    run.diagnostic = report.violations.front();
  } else if (!report.quiescent) {
    run.diagnostic = "no quiescence within " + std::to_string(sc.max_rounds) + " rounds";
  }
  return run;
}

}  // namespace

SweepReport sweep(const Scenario& base, const SweepRanges& ranges) {
  std::vector<Point> points;
  for (const auto& n : axis(ranges.n)) {
    for (const auto& seed : axis(ranges.seeds)) {
      for (const auto& alphabet : axis(ranges.alphabet)) {
        for (const auto& h_max : axis(ranges.h_max)) {
          for (const auto& max_rounds : axis(ranges.max_rounds)) {
            for (const auto& k : axis(ranges.replicate)) {
              Point point{base, k.value_or(0), ""};
              Scenario& sc = point.scenario;
              std::ostringstream label;
              if (n) {
                if (sc.graph.kind == "explicit") throw ScenarioError("cannot resize an explicit graph");
                sc.graph.n = sc.graph.kind == "star" ? *n + 1 : *n;
                sc.values.clear();
                label << "n=" << *n << ' ';
              }
              if (seed) {
                sc.seed = *seed;
                sc.graph.seed.reset();
                label << "seed=" << *seed << ' ';
              }
              if (alphabet) {
                sc.alphabet = *alphabet;
                sc.values.clear();
                label << "K=" << *alphabet << ' ';
              }
              if (h_max) {
                sc.h_max = *h_max;
                label << "h_max=" << *h_max << ' ';
              }
              if (max_rounds) {
                sc.max_rounds = *max_rounds;
                label << "max_rounds=" << *max_rounds << ' ';
              }
              if (k) {
                if (sc.graph.kind != "ring") throw ScenarioError("replication sweeps need a ring base graph");
                label << "k=" << *k << ' ';
              }
              point.label = label.str();
              if (!point.label.empty()) point.label.pop_back();
              if (point.label.empty()) point.label = base.name;
              points.push_back(std::move(point));
            }
          }
        }
      }
    }
  }

  SweepReport report;
  report.runs.resize(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < points.size(); ++i) {
    Scenario sc = points[i].scenario;
    sc.trace = TraceLevel::none;
    SweepRun& run = report.runs[i];
    run.label = points[i].label;
    try {
      if (points[i].k != 0) {
        run = replicate(points[i]);
      } else {
        const ScenarioResult result = run_scenario(sc);
        run.passed = result.exit_code == exit_ok;
        run.rounds = result.report.rounds;
        run.diagnostic = result.diagnostic;
      }
    } catch (const std::exception& e) {
      run.passed = false;
      run.diagnostic = e.what();
    }
  }
  for (const auto& run : report.runs) {
    ++(run.passed ? report.passed : report.failed);
    report.max_rounds = std::max(report.max_rounds, run.rounds);
  }
  return report;
}

}  // namespace anoncomp
