#include <doctest.h>

#include <random>

#include "anoncomp/averaging.hpp"
#include "anoncomp/engine.hpp"
#include "anoncomp/graph.hpp"

using namespace anoncomp;

namespace {

// Broadcasts x; outputs the sum of what arrived.
struct Echo {
  using Input = int;
  using Memory = int;
  using Output = int;
  using Message = int;

  void transition(const NodeState<Echo>& current, const Inbox<int>& inbox, NodeState<Echo>& next) const {
    int sum = 0;
    for (Port k = 1; k <= inbox.degree(); ++k) sum += inbox[k];
    next.z = current.z + 1 > 2 ? 2 : current.z + 1;
    next.y = current.z == 0 ? 0 : sum;
    for (auto& m : next.out) m = current.x;
  }
};

// Sends its round counter and records whether any neighbor's counter ever
// differed, which would mean it saw a message from a different round.
struct Clock {
  using Input = int;
  using Memory = int;
  using Output = bool;
  using Message = int;

  void transition(const NodeState<Clock>& current, const Inbox<int>& inbox, NodeState<Clock>& next) const {
    bool mixed = current.y;
    for (Port k = 1; k <= inbox.degree(); ++k) mixed = mixed || inbox[k] != current.z;
    next.z = current.z + 1;
    next.y = mixed;
    for (auto& m : next.out) m = next.z;
  }
};

struct Mute {
  using Input = int;
  using Memory = int;
  using Output = int;
  using Message = int;

  void transition(const NodeState<Mute>&, const Inbox<int>&, NodeState<Mute>& next) const { next.out.clear(); }
};

// Reports, per port, the degree of whoever sent the message.
struct Ping {
  using Input = int;
  using Memory = std::vector<int>;
  using Output = int;
  using Message = int;

  void transition(const NodeState<Ping>& current, const Inbox<int>& inbox, NodeState<Ping>& next) const {
    next.z.clear();
    for (Port k = 1; k <= inbox.degree(); ++k) next.z.push_back(inbox[k]);
    (void)current;
    for (auto& m : next.out) m = static_cast<int>(next.out.size());
  }
};

}  // namespace

TEST_CASE("echo on a star") {
  const auto g = star(3);
  const std::vector<int> x{10, 1, 2, 3};
  auto config = initial_configuration<Echo>(g, x);
  config = step(config, g, Echo{});
  CHECK(config.round == 1);
  config = step(config, g, Echo{});
  CHECK(config.nodes[0].y == 6);
  CHECK(config.nodes[1].y == 10);
  CHECK(config.nodes[3].y == 10);
  const auto again = step(config, g, Echo{});
  CHECK(again.nodes == config.nodes);
}

TEST_CASE("messages are routed through the reverse port") {
  const auto g = star(2);
  const std::vector<int> x{0, 0, 0};
  auto config = initial_configuration<Ping>(g, x);
  config = step(step(config, g, Ping{}), g, Ping{});
  CHECK(config.nodes[0].z == std::vector<int>{1, 1});
  CHECK(config.nodes[1].z == std::vector<int>{2});
}

TEST_CASE("every transition sees one round's snapshot") {
  const auto g = random_connected(40, 40, 5);
  const std::vector<int> x(40, 0);
  for (const auto execution : {Execution::serial, Execution::parallel}) {
    Simulator<Clock> sim(g, Clock{}, x, execution);
    // round 0 messages are empty (0), matching clock 0
    for (int r = 0; r < 10; ++r) sim.step();
    for (const auto& node : sim.configuration().nodes) CHECK_FALSE(node.y);
  }
}

TEST_CASE("run_until_quiescent") {
  const auto g = ring(4);
  const std::vector<int> x{1, 2, 3, 4};

  SUBCASE("reaches the fixed point") {
    const auto result = run_until_quiescent(g, Echo{}, std::span<const int>(x), RunOptions{});
    CHECK(result.quiescent);
    CHECK(result.outputs == std::vector<int>{6, 4, 6, 4});
  }
  SUBCASE("zero rounds is rejected") {
    RunOptions options;
    options.max_rounds = 0;
    CHECK_THROWS_AS(run_until_quiescent(g, Echo{}, std::span<const int>(x), options), std::invalid_argument);
  }
  SUBCASE("a budget of one round is not enough") {
    RunOptions options;
    options.max_rounds = 1;
    const auto result = run_until_quiescent(g, Clock{}, std::span<const int>(x), options);
    CHECK_FALSE(result.quiescent);
    CHECK(result.rounds == 1);
  }
  SUBCASE("trace keeps every configuration") {
    RunOptions options;
    options.keep_trace = true;
    const auto result = run_until_quiescent(g, Echo{}, std::span<const int>(x), options);
    CHECK(result.trace.size() == result.rounds + 1);
    CHECK(result.trace.front().round == 0);
  }
}

TEST_CASE("wrong message count is a fault") {
  const auto g = ring(3);
  const std::vector<int> x{0, 0, 0};
  const auto config = initial_configuration<Mute>(g, x);
  CHECK_THROWS_AS(step(config, g, Mute{}), ProtocolFault);
  CHECK_THROWS_AS(initial_configuration<Echo>(g, std::vector<int>{1}), std::invalid_argument);
}

TEST_CASE("serial and parallel rounds agree") {
  const auto g = random_connected(300, 600, 11);
  std::mt19937_64 rng(3);
  std::vector<int> x(300);
  for (auto& v : x) v = static_cast<int>(rng() % 8);
  const AveragingProtocol protocol(AvgParams{7, 300});
  auto serial = initial_configuration<AveragingProtocol>(g, x);
  auto parallel = serial;
  for (int r = 0; r < 60; ++r) {
    serial = step(serial, g, protocol, Execution::serial);
    parallel = step(parallel, g, protocol, Execution::parallel);
    REQUIRE(serial == parallel);
  }
}

TEST_CASE("bank runs components side by side") {
  Bank<Echo> bank;
  bank.add(Echo{});
  bank.add(Echo{}, [](const int& x) { return 10 * x; });
  const auto g = path(3);
  const std::vector<int> x{1, 2, 3};
  const auto result = run_until_quiescent(g, bank, std::span<const int>(x), RunOptions{});
  REQUIRE(result.quiescent);
  CHECK(result.outputs[1] == std::vector<int>{4, 40});
  CHECK(result.outputs[0] == std::vector<int>{2, 20});
}
