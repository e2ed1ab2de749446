#include <doctest.h>

#include <numeric>
#include <random>

#include "anoncomp/verification.hpp"
#include "support/oracle.hpp"

using namespace anoncomp;

TEST_CASE("oracle_average") {
  CHECK(oracle_average(std::vector<int>{1, 2, 2, 3}, 3) == IntervalValue::point(2));
  CHECK(oracle_average(std::vector<int>{0, 1}, 1) == IntervalValue::between(0));
  CHECK(oracle_average(std::vector<int>{0, 0, 1}, 1) == IntervalValue::between(0));
  CHECK_THROWS(oracle_average(std::vector<int>{}, 1));
}

TEST_CASE("oracle_proportions") {
  const auto p = oracle_proportions(std::vector<int>{1, 1, 0, 0, 0, 1}, 1);
  CHECK(p[1] == Rational(1, 2));
  const auto q = oracle_proportions(std::vector<int>{2, 2, 2}, 2);
  CHECK(q[2] == Rational(1));
  CHECK(q[1] == Rational(0));
  const std::vector<int> x{0, 3, 1, 1};
  std::vector<int> twice = x;
  twice.insert(twice.end(), x.begin(), x.end());
  CHECK(oracle_proportions(x, 3) == oracle_proportions(twice, 3));
  CHECK_THROWS(oracle_proportions(std::vector<int>{}, 1));
}

TEST_CASE("oracle_evaluate") {
  const auto majority = majority_spec();
  CHECK(majority.levels[oracle_evaluate(majority, oracle_proportions(std::vector<int>{1, 1, 0, 0, 0}, 1))].label ==
        "le_half");
  CHECK(majority.levels[oracle_evaluate(majority, oracle_proportions(std::vector<int>{1, 0}, 1))].label == "le_half");
  const auto second = rank_spec(4, 2);
  const std::vector<int> x{1, 1, 1, 1, 2, 2, 2, 3, 3, 4};
  CHECK(second.levels[oracle_evaluate(second, oracle_proportions(x, 4))].label == "2");

  LevelSetSpec partial;
  partial.levels.push_back({"low", {Clause{{RationalInequality{{Rational(1)}, Rational(1, 3), false}}}}});
  CHECK_THROWS_AS(oracle_evaluate(partial, oracle_proportions(std::vector<int>{1, 1}, 1)), CoverageError);
}

TEST_CASE("least_integral_multiple") {
  CHECK(least_integral_multiple(Rational(0)) == 1);
  CHECK(least_integral_multiple(Rational(1)) == 1);
  CHECK(least_integral_multiple(Rational(2, 4)) == 2);
  CHECK(least_integral_multiple(Rational(3, 7)) == 7);
}

TEST_CASE("consensus_text") {
  const auto text = [](int v) { return std::to_string(v); };
  CHECK(consensus_text(std::vector<int>{3, 3}, text) == "3");
  CHECK(consensus_text(std::vector<int>{3, 4}, text) == "[3, 4]");
  CHECK(output_text(std::optional<IntervalValue>{}) == "-");
  CHECK(output_text(std::optional<IntervalValue>{IntervalValue::between(2)}) == "(2,3)");
}

TEST_CASE("library oracles agree with the independent ones") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (int K = 1; K <= 3; ++K) {
      ref::for_each_vector(n, 0, K, [&](const std::vector<int>& x) {
        CHECK(to_string(oracle_average(x, K)) == ref::mean_label(x));
        const auto p = oracle_proportions(x, K);
        const auto c = ref::counts(x, K);
        for (int v = 0; v <= K; ++v) CHECK(p[v] == Rational(c[v], static_cast<std::int64_t>(n)));
      });
    }
  }
}

TEST_CASE("average membership spec matches oracle_average") {
  for (int K = 1; K <= 3; ++K) {
    const auto spec = average_membership_spec(K);
    for (std::size_t n = 1; n <= 8; ++n) {
      ref::for_each_vector(n, 0, K, [&](const std::vector<int>& x) {
        CHECK(spec.levels[oracle_evaluate(spec, oracle_proportions(x, K))].label == ref::mean_label(x));
      });
    }
  }
}

TEST_CASE("equivariance") {
  SUBCASE("identity") {
    const auto g = random_connected(7, 4, 2);
    std::vector<NodeId> identity(7);
    std::iota(identity.begin(), identity.end(), 0);
    const std::vector<int> x{0, 1, 2, 3, 0, 1, 2};
    CHECK(check_equivariance(AveragingProtocol({3, 7}), g, std::span<const int>(x), identity).passed());
  }
  SUBCASE("swap on complete(3)") {
    const std::vector<NodeId> swap{1, 0, 2};
    const std::vector<int> x{0, 2, 1};
    const auto report = check_equivariance(AveragingProtocol({2, 3}), complete(3), std::span<const int>(x), swap);
    CHECK(report.passed());
    CHECK(report.quiescent);
  }
  SUBCASE("rotation of ring(4), frequency") {
    const std::vector<NodeId> rotate{1, 2, 3, 0};
    const std::vector<int> x{1, 0, 0, 1};
    const FrequencyProtocol protocol(FrequencyParams{1, 4, 4});
    const auto report = check_equivariance(protocol, ring(4), std::span<const int>(x), rotate, 5000);
    CHECK(report.passed());
    CHECK(report.quiescent);
  }
}

namespace {

// Numbers nodes by call order, so it can tell nodes apart. Impure on purpose.
struct CallOrder {
  using Input = int;
  using Memory = int;
  using Output = int;
  using Message = int;

  mutable int calls = 0;

  void transition(const NodeState<CallOrder>&, const Inbox<int>&, NodeState<CallOrder>& next) const {
    next.z = calls++;
  }
};

}  // namespace

TEST_CASE("equivariance catches a protocol that sees node identities") {
  const std::vector<NodeId> rotate{1, 2, 0};
  const std::vector<int> x{5, 6, 7};
  const auto report = check_equivariance(CallOrder{}, ring(3), std::span<const int>(x), rotate);
  CHECK_FALSE(report.passed());
  CHECK(report.observed.find("diverges") != std::string::npos);
}

TEST_CASE("replication") {
  SUBCASE("three nodes twice, trackers") {
    const std::vector<int> x{1, 2, 3};
    CHECK(check_replication(TrackerProtocol({6, Extremum::max}), std::span<const int>(x), 2).passed());
  }
  SUBCASE("k = 1") {
    const std::vector<int> x{1, 2, 3};
    CHECK(check_replication(AveragingProtocol({3, 3}), std::span<const int>(x), 1).passed());
  }
  SUBCASE("two nodes three times, averaging") {
    const std::vector<int> x{0, 1};
    const AveragingProtocol protocol({1, 6});
    const auto report = check_replication(protocol, std::span<const int>(x), 3);
    CHECK(report.passed());
    const auto small = run_until_quiescent(ring(2), protocol, std::span<const int>(x), RunOptions{});
    for (const auto& y : small.outputs) CHECK(y == IntervalValue::between(0));
  }
}
