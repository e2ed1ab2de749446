#include <doctest.h>

#include "anoncomp/frequency.hpp"
#include "anoncomp/verification.hpp"

using namespace anoncomp;

namespace {

RunResult<FrequencyProtocol> frequency(const PortLabeledGraph& g, const std::vector<int>& x, int target = 1) {
  const FrequencyProtocol protocol(FrequencyParams{target, g.size(), static_cast<int>(g.size())});
  RunOptions options;
  options.max_rounds = 200000;
  return run_until_quiescent(g, protocol, std::span<const int>(x), options);
}

std::shared_ptr<const InstanceSlot> slot_with(std::optional<IntervalValue> y) {
  auto slot = std::make_shared<InstanceSlot>();
  slot->state = AvgNodeState{};
  slot->state->y = y;
  return slot;
}

}  // namespace

TEST_CASE("triangular schedule") {
  CHECK(schedule_index(0) == 1);
  CHECK(schedule_index(1) == 1);
  CHECK(schedule_index(2) == 2);
  CHECK(schedule_index(5) == 3);
  CHECK(schedule_index(6) == 1);
  // each instance m runs once in every block from the m-th on
  std::vector<int> hits(5, 0);
  for (std::size_t t = 0; t < 15; ++t) ++hits[schedule_index(t) - 1];
  CHECK(hits == std::vector<int>{5, 4, 3, 2, 1});
}

TEST_CASE("readout takes the smallest singleton instance") {
  InterleavedState s;
  CHECK_FALSE(readout(s));
  s.instances = {slot_with(IntervalValue::between(0)), slot_with(IntervalValue::point(1)),
                 slot_with(IntervalValue::point(2))};
  CHECK(readout(s) == FrequencyReadout{2, 1});
  s.instances[0] = slot_with(std::nullopt);
  CHECK(readout(s) == FrequencyReadout{2, 1});
  s.instances[0] = slot_with(IntervalValue::point(0));
  CHECK(readout(s)->value() == Rational(0));
}

TEST_CASE("equality compares slot contents") {
  InterleavedState a;
  a.instances = {slot_with(IntervalValue::point(1))};
  InterleavedState b;
  b.instances = {slot_with(IntervalValue::point(1))};
  CHECK(a == b);
  b.instances[0] = slot_with(IntervalValue::point(0));
  CHECK_FALSE(a == b);
}

TEST_CASE("frequency of the target value") {
  SUBCASE("all ones") {
    const auto result = frequency(ring(3), {1, 1, 1});
    REQUIRE(result.quiescent);
    for (const auto& y : result.outputs) CHECK(y == FrequencyReadout{1, 1});
  }
  SUBCASE("half") {
    const auto result = frequency(ring(4), {1, 0, 1, 0});
    REQUIRE(result.quiescent);
    for (const auto& y : result.outputs) CHECK(y == FrequencyReadout{2, 1});
  }
  SUBCASE("none") {
    const auto result = frequency(complete(2), {0, 0});
    REQUIRE(result.quiescent);
    for (const auto& y : result.outputs) CHECK(y == FrequencyReadout{1, 0});
  }
  SUBCASE("other target") {
    const auto result = frequency(path(5), {2, 0, 2, 1, 2}, 2);
    REQUIRE(result.quiescent);
    for (const auto& y : result.outputs) CHECK(y == FrequencyReadout{5, 3});
  }
}

TEST_CASE("instances above m_max are skipped") {
  const FrequencyProtocol protocol(FrequencyParams{1, 2, 4});
  Simulator<FrequencyProtocol> sim(ring(3), protocol, std::vector<int>{1, 0, 0});
  for (int r = 0; r < 6; ++r) sim.step();
  const auto& z = *sim.configuration().nodes[0].z;
  CHECK(z.instances.size() == 2);
  CHECK(z.skipped == 1);
  CHECK(z.clock == 6);
  CHECK_THROWS_AS(FrequencyProtocol(FrequencyParams{1, 0, 4}), std::invalid_argument);
}

TEST_CASE("the full frequency vector sums to one") {
  const auto g = random_connected(6, 3, 9);
  const std::vector<int> x{0, 2, 2, 1, 0, 2};
  const auto bank = frequency_vector_bank(2, g.size(), static_cast<int>(g.size()));
  RunOptions options;
  options.max_rounds = 200000;
  const auto result = run_until_quiescent(g, bank, std::span<const int>(x), options);
  REQUIRE(result.quiescent);
  for (const auto& out : result.outputs) {
    const auto p = proportion_readout(out);
    REQUIRE(p);
    CHECK(*p == oracle_proportions(x, 2));
    Rational total = 0;
    for (const auto& share : p->p) total += share;
    CHECK(total == Rational(1));
  }
}

TEST_CASE("audit_frequency") {
  const std::vector<int> x{1, 1, 0, 1, 0, 0};
  const auto report = audit_frequency(ring(6), x, FrequencyParams{1, 6, 6}, RunOptions{200000});
  CHECK(report.passed());
  CHECK(report.expected == "1/2 m=2");
}
