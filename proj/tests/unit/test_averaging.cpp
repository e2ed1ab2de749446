#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "anoncomp/averaging.hpp"
#include "anoncomp/verification.hpp"

using namespace anoncomp;

namespace {

RunResult<AveragingProtocol> average(const PortLabeledGraph& g, const std::vector<int>& x, int q_cap) {
  const AveragingProtocol protocol(AvgParams{q_cap, static_cast<int>(g.size())});
  return run_until_quiescent(g, protocol, std::span<const int>(x), RunOptions{});
}

std::vector<int> final_u(const RunResult<AveragingProtocol>& result) {
  std::vector<int> u;
  for (const auto& node : result.final.nodes) u.push_back(node.z->u);
  return u;
}

AvgMessage request(int r) {
  AvgMessage m;
  m.request = r;
  return m;
}

}  // namespace

TEST_CASE("avg_init") {
  const AvgParams params{5, 8};
  const auto s = avg_init(2, 3, params);
  CHECK(s.u == 3);
  CHECK(s.mode == Mode::free);
  CHECK_FALSE(s.rin);
  CHECK_FALSE(s.rout);
  CHECK(s.max_tracker.estimate == 3);
  CHECK(s.min_tracker.estimate == 3);
  CHECK(avg_init(1, 0, AvgParams{1, 8}).u == 0);
  CHECK_THROWS_AS(avg_init(1, 6, params), std::invalid_argument);
  CHECK_THROWS_AS(avg_init(1, -1, params), std::invalid_argument);
}

TEST_CASE("decode_output") {
  CHECK(decode_output(2, 2, 2) == IntervalValue::point(2));
  CHECK(decode_output(1, 1, 0) == IntervalValue::between(0));
  CHECK_FALSE(decode_output(3, 5, 1));
  CHECK(to_string(IntervalValue::point(4)) == "{4}");
  CHECK(to_string(IntervalValue::between(4)) == "(4,5)");
}

TEST_CASE("IntervalValue::contains") {
  CHECK(IntervalValue::point(2).contains(Rational(2)));
  CHECK_FALSE(IntervalValue::point(2).contains(Rational(5, 2)));
  CHECK(IntervalValue::between(2).contains(Rational(5, 2)));
  CHECK_FALSE(IntervalValue::between(2).contains(Rational(3)));
}

TEST_CASE("serving requests") {
  const AvgParams params{9, 4};
  std::vector<AvgMessage> out(2);

  SUBCASE("rich node accepts half the gap") {
    const InboxBuffer<AvgMessage> in({request(0), AvgMessage{}});
    const auto next = avg_transition(avg_init(2, 4, params), in.view(), params, out);
    CHECK(next.u == 2);
    CHECK(out[0].accept == 2);
    CHECK_FALSE(out[1].accept);
  }
  SUBCASE("second request in a round is denied") {
    const InboxBuffer<AvgMessage> in({request(0), request(1)});
    const auto next = avg_transition(avg_init(2, 6, params), in.view(), params, out);
    CHECK(next.u == 3);
    CHECK(out[0].accept == 3);
    CHECK(out[1].accept == 0);
  }
  SUBCASE("poor node with nowhere to forward denies") {
    const InboxBuffer<AvgMessage> in({request(0), AvgMessage{}});
    const auto next = avg_transition(avg_init(2, 1, params), in.view(), params, out);
    CHECK(next.u == 1);
    CHECK(out[0].accept == 0);
  }
  SUBCASE("stray accept is a violation") {
    AvgMessage stray;
    stray.accept = 1;
    const InboxBuffer<AvgMessage> in({stray, AvgMessage{}});
    CHECK_THROWS_AS(avg_transition(avg_init(2, 1, params), in.view(), params, out), ProtocolViolation);
  }
}

TEST_CASE("two nodes settle on the mean") {
  const auto result = average(complete(2), {0, 2}, 2);
  REQUIRE(result.quiescent);
  CHECK(final_u(result) == std::vector<int>{1, 1});
  for (const auto& y : result.outputs) CHECK(y == IntervalValue::point(1));
}

TEST_CASE("requests are forwarded along the pointer") {
  const auto result = average(path(3), {0, 0, 4}, 4);
  REQUIRE(result.quiescent);
  auto u = final_u(result);
  std::sort(u.begin(), u.end());
  CHECK(u == std::vector<int>{1, 1, 2});
  for (const auto& y : result.outputs) CHECK(y == IntervalValue::between(1));
}

TEST_CASE("balanced input never requests") {
  const auto g = ring(2);
  const AveragingProtocol protocol(AvgParams{5, 2});
  Simulator<AveragingProtocol> sim(g, protocol, std::vector<int>{5, 5});
  for (int r = 0; r < 6; ++r) {
    sim.step();
    for (const auto& node : sim.configuration().nodes) {
      for (const auto& m : node.out) CHECK_FALSE(m.request);
    }
  }
  const auto result = average(g, {5, 5}, 5);
  CHECK(result.quiescent);
  CHECK(result.outputs[0] == IntervalValue::point(5));
}

TEST_CASE("a node holding K never sends a request") {
  const auto g = star(3);
  const AveragingProtocol protocol(AvgParams{4, 4});
  Simulator<AveragingProtocol> sim(g, protocol, std::vector<int>{4, 0, 1, 2});
  for (int r = 0; r < 30; ++r) {
    const bool full = sim.configuration().nodes[0].z && sim.configuration().nodes[0].z->u == 4;
    sim.step();
    if (!full) continue;
    for (const auto& m : sim.configuration().nodes[0].out) CHECK_FALSE(m.request);
  }
}

TEST_CASE("conservation, spread and the squared potential") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 14;
    const int K = 1 + static_cast<int>(rng() % 9);
    const auto g = random_connected(n, rng() % (n + 1), rng());
    std::vector<int> x(n);
    for (auto& v : x) v = static_cast<int>(rng() % (K + 1));
    const std::int64_t sum = std::accumulate(x.begin(), x.end(), std::int64_t{0});

    const AveragingProtocol protocol(AvgParams{K, static_cast<int>(n)});
    Simulator<AveragingProtocol> sim(g, protocol, x);
    std::int64_t potential = 0;
    for (int v : x) potential += std::int64_t{v} * v;
    bool fixed = false;
    for (int r = 0; r < 20000 && !fixed; ++r) {
      fixed = sim.step();
      const auto& config = sim.configuration();
      REQUIRE(pebble_total(config) == sum);
      bool in_flight = false;
      std::int64_t squares = 0;
      for (const auto& node : config.nodes) {
        squares += std::int64_t{node.z->u} * node.z->u;
        for (const auto& m : node.out) in_flight = in_flight || m.accept.value_or(0) > 0;
      }
      // only compare rounds where no transfer is half done
      if (!in_flight) {
        CHECK(squares <= potential);
        potential = squares;
      }
    }
    REQUIRE(fixed);
    std::vector<int> u;
    for (const auto& node : sim.configuration().nodes) u.push_back(node.z->u);
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    CHECK(*hi - *lo <= 1);
    const auto expected = oracle_average(x, K);
    for (const auto& node : sim.configuration().nodes) CHECK(node.y == expected);
  }
}

TEST_CASE("audit_averaging reports agreement") {
  const std::vector<int> x{0, 3, 3, 2};
  const auto report = audit_averaging(ring(4), x, AvgParams{3, 4}, RunOptions{});
  CHECK(report.passed());
  CHECK(report.quiescent);
  CHECK(report.expected == "{2}");
}
