#include <doctest.h>

#include <algorithm>
#include <random>

#include "anoncomp/extrema.hpp"
#include "anoncomp/verification.hpp"

using namespace anoncomp;

namespace {

using Report = std::optional<TrackerMessage>;

std::vector<TrackerState> states_of(const Configuration<TrackerProtocol>& config) {
  std::vector<TrackerState> out;
  for (const auto& node : config.nodes) out.push_back(*node.z);
  return out;
}

RunResult<TrackerProtocol> track(const PortLabeledGraph& g, const std::vector<int>& u, Extremum order = Extremum::max) {
  const TrackerProtocol protocol(TrackerParams{static_cast<int>(g.size()), order});
  return run_until_quiescent(g, protocol, std::span<const int>(u), RunOptions{});
}

}  // namespace

TEST_CASE("tracker_init") {
  CHECK(tracker_init(5) == TrackerState{5, 5, kSelf, 0});
  CHECK(tracker_init(0) == TrackerState{0, 0, kSelf, 0});
  CHECK(tracker_report(tracker_init(3)) == TrackerMessage{3, 0});
}

TEST_CASE("tracker_transition picks the best candidate") {
  const TrackerState start{1, 1, kSelf, 0};

  SUBCASE("larger report wins") {
    const std::vector<Report> in{std::nullopt, TrackerMessage{3, 0}};
    CHECK(tracker_transition(start, 1, in, 8) == TrackerState{1, 3, 2, 1});
  }
  SUBCASE("own value when maximal") {
    const std::vector<Report> in{TrackerMessage{4, 0}, TrackerMessage{2, 5}};
    CHECK(tracker_transition(TrackerState{4, 4, kSelf, 0}, 4, in, 8) == TrackerState{4, 4, kSelf, 0});
  }
  SUBCASE("fewer hops then lower port") {
    const std::vector<Report> in{TrackerMessage{6, 3}, TrackerMessage{6, 1}, TrackerMessage{6, 1}};
    CHECK(tracker_transition(start, 1, in, 8) == TrackerState{1, 6, 2, 2});
  }
  SUBCASE("reports at the cap are dropped") {
    const std::vector<Report> in{TrackerMessage{9, 8}};
    CHECK(tracker_transition(start, 1, in, 8) == TrackerState{1, 1, kSelf, 0});
  }
  SUBCASE("reports above the cap are a violation") {
    const std::vector<Report> in{TrackerMessage{9, 9}};
    CHECK_THROWS_AS(tracker_transition(start, 1, in, 8), ProtocolViolation);
  }
  SUBCASE("minimum order") {
    const std::vector<Report> in{TrackerMessage{0, 2}, TrackerMessage{3, 0}};
    CHECK(tracker_transition(start, 1, in, 8, Extremum::min) == TrackerState{1, 0, 1, 3});
  }
}

TEST_CASE("stale maxima decay against the hop cap") {
  const int h_max = 6;
  const auto g = ring(3);
  const TrackerProtocol protocol(TrackerParams{h_max, Extremum::max});
  auto config = initial_configuration<TrackerProtocol>(g, std::vector<int>{2, 2, 2});
  for (auto& node : config.nodes) {
    node.z = TrackerState{2, 9, 1, h_max - 1};
    for (auto& m : node.out) m = TrackerMessage{9, h_max - 1};
  }
  for (int r = 0; r < h_max + 2; ++r) config = step(config, g, protocol);
  for (const auto& node : config.nodes) CHECK(*node.z == TrackerState{2, 2, kSelf, 0});
}

TEST_CASE("pointer_chain") {
  SUBCASE("path with the maximum in the middle") {
    const auto g = path(3);
    const auto result = track(g, {1, 5, 2});
    REQUIRE(result.quiescent);
    const auto states = states_of(result.final);
    CHECK(pointer_chain(g, states, 1) == 1);
    CHECK(pointer_chain(g, states, 2) == 1);
    CHECK(pointer_chain(g, states, 0) == 1);
  }
  SUBCASE("star center reaches a leaf holding the maximum") {
    const auto g = star(3);
    const std::vector<int> u{0, 7, 7, 3};
    const auto result = track(g, u);
    const auto states = states_of(result.final);
    const NodeId end = pointer_chain(g, states, 0);
    CHECK(u[end] == 7);
    CHECK(end == 1);
  }
  SUBCASE("cycles are reported") {
    const auto g = ring(3);
    const std::vector<TrackerState> states{{0, 4, 2, 1}, {0, 4, 1, 1}, {4, 4, kSelf, 0}};
    CHECK_THROWS_AS(pointer_chain(g, states, 0), ProtocolViolation);
  }
}

TEST_CASE("static inputs converge within the diameter") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = random_connected(15, trial % 6, trial);
    std::vector<int> u(15);
    for (auto& v : u) v = static_cast<int>(rng() % 20);
    const int top = *std::max_element(u.begin(), u.end());
    const TrackerProtocol protocol(TrackerParams{15, Extremum::max});
    Simulator<TrackerProtocol> sim(g, protocol, u);
    std::vector<int> previous(15, -1);
    const std::size_t deadline = diameter(g) + 1;
    for (std::size_t r = 1; r <= deadline + 2; ++r) {
      sim.step();
      for (NodeId i = 0; i < 15; ++i) {
        const int estimate = *sim.configuration().nodes[i].y;
        CHECK(estimate >= previous[i]);
        previous[i] = estimate;
        if (r >= deadline) CHECK(estimate == top);
      }
    }
  }
}

TEST_CASE("hop counts equal chain lengths at quiescence") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_connected(12, 5, seed);
    std::mt19937_64 rng(seed);
    std::vector<int> u(12);
    for (auto& v : u) v = static_cast<int>(rng() % 4);
    const auto result = track(g, u);
    REQUIRE(result.quiescent);
    const auto states = states_of(result.final);
    for (NodeId i = 0; i < 12; ++i) {
      int length = 0;
      NodeId at = i;
      while (states[at].parent != kSelf) {
        at = g.neighbor(at, states[at].parent);
        ++length;
      }
      CHECK(length == states[i].hops);
    }
  }
}

TEST_CASE("minimum on u mirrors maximum on K - u") {
  const int K = 9;
  const auto g = random_connected(16, 8, 4);
  std::mt19937_64 rng(4);
  std::vector<int> u(16);
  for (auto& v : u) v = static_cast<int>(rng() % (K + 1));
  std::vector<int> flipped(16);
  for (std::size_t i = 0; i < 16; ++i) flipped[i] = K - u[i];
  Simulator<TrackerProtocol> lo(g, TrackerProtocol({16, Extremum::min}), u);
  Simulator<TrackerProtocol> hi(g, TrackerProtocol({16, Extremum::max}), flipped);
  for (int r = 0; r < 12; ++r) {
    lo.step();
    hi.step();
    for (NodeId i = 0; i < 16; ++i) {
      const auto& a = *lo.configuration().nodes[i].z;
      const auto& b = *hi.configuration().nodes[i].z;
      CHECK(a.estimate == K - b.estimate);
      CHECK(a.parent == b.parent);
      CHECK(a.hops == b.hops);
    }
  }
}

TEST_CASE("scheduled input changes") {
  const auto g = path(6);
  const std::vector<int> initial{1, 2, 9, 3, 4, 5};
  const std::vector<InputChange> changes{{4, 2, 0}, {10, 0, 7}};
  const TrackerParams params{6, Extremum::max};
  const auto run = run_tracker(g, initial, changes, params, RunOptions{});
  CHECK(run.truth == 7);
  CHECK(run.result.quiescent);
  CHECK(run.result.rounds > 10);
  for (const auto& y : run.result.outputs) CHECK(*y == 7);

  const ScheduledInputs schedule(changes);
  CHECK(schedule.final_inputs(initial) == std::vector<int>{7, 2, 0, 3, 4, 5});
  const std::vector<InputChange> bad{{0, 1, 1}};
  CHECK_THROWS_AS(ScheduledInputs{bad}, std::invalid_argument);

  const auto report = audit_tracker(g, initial, changes, params, RunOptions{});
  CHECK(report.passed());
}

TEST_CASE("state size audit") {
  const auto audit = audit_tracker_state(16, 64, 3);
  CHECK(audit.bits == 4 + 4 + 7 + 2);
  CHECK(audit.constant > 0.0);
  CHECK(audit.constant < 2.0);
}
