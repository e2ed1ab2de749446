#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "anoncomp/averaging.hpp"
#include "anoncomp/engine.hpp"
#include "anoncomp/rational.hpp"

namespace anoncomp {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Some proportion vector is matched by no clause.
class CoverageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frequencies of the values 0..K; p[v] is the share of nodes holding v.
struct ProportionVector {
  std::vector<Rational> p;

  int alphabet_max() const { return static_cast<int>(p.size()) - 1; }
  const Rational& operator[](std::size_t value) const { return p[value]; }
  bool operator==(const ProportionVector&) const = default;
};

std::string to_string(const ProportionVector& p);

/// sum_k coefficients[k-1] * p_k  (<= or <)  threshold
struct RationalInequality {
  std::vector<Rational> coefficients;
  Rational threshold;
  bool strict = false;

  bool operator==(const RationalInequality&) const = default;
};

bool holds(const RationalInequality& inequality, const ProportionVector& p);

/// Denominator-cleared form: node i contributes
///   q_i = sum_{k in P} beta_k chi_k(i) + sum_{k not in P} beta_k (1 - chi_k(i))
/// and the inequality holds iff mean(q) <= q_star (< when strict).
struct IntegerComparison {
  std::vector<std::int64_t> beta;
  std::vector<bool> positive;
  std::int64_t q_star = 0;
  bool strict = false;

  std::int64_t q_cap() const;
  /// Values k (1-based) in P with a nonzero coefficient.
  std::vector<int> positive_set() const;

  bool operator==(const IntegerComparison&) const = default;
};

IntegerComparison normalize_inequality(const RationalInequality& inequality);
std::int64_t encode_local(int x, const IntegerComparison& comparison);

/// Reads the comparison's verdict off the averaging output for the q_i.
/// Empty while the average is undecided.
std::optional<bool> decide_comparison(const std::optional<IntervalValue>& average, const IntegerComparison& comparison);

struct Clause {
  std::vector<RationalInequality> all_of;
  bool operator==(const Clause&) const = default;
};

struct LevelSet {
  std::string label;
  std::vector<Clause> any_of;
  bool operator==(const LevelSet&) const = default;
};

/// A function on the proportion set given by its level sets. Inputs range
/// over min_value..K; values below min_value never occur.
struct LevelSetSpec {
  int alphabet_max = 1;
  int min_value = 0;
  std::vector<LevelSet> levels;

  bool operator==(const LevelSetSpec&) const = default;
};

bool clause_holds(const Clause& clause, const ProportionVector& p);
/// Index of the first level (in spec order) with a matching clause.
std::optional<std::size_t> first_match(const LevelSetSpec& spec, const ProportionVector& p);

/// Calls fn(p) for every proportion vector with denominator exactly n whose
/// support lies in min_value..K.
void for_each_proportion(int alphabet_max, int min_value, int n, const std::function<void(const ProportionVector&)>& fn);

struct ValidationReport {
  std::size_t points_checked = 0;
  std::vector<ProportionVector> uncovered;
  /// Points matched by clauses of two different levels (resolved first-match).
  std::vector<ProportionVector> overlaps;

  bool covered() const { return uncovered.empty(); }
};

/// Exhaustive check over every proportion vector with denominator up to the
/// bound. Throws SpecError for structurally invalid specs.
ValidationReport validate(const LevelSetSpec& spec, int denominator_bound = 12);

/// Text form; see docs/spec-format.md. Throws SpecError with a line number.
LevelSetSpec parse_level_set_spec(std::string_view text);
std::string to_text(const LevelSetSpec& spec);

/// Node automaton for a compiled spec: one averaging instance per distinct
/// IntegerComparison, run as a Bank, and a first-match decision on top.
class CompiledProtocol {
 public:
  using AvgBank = Bank<AveragingProtocol>;
  using Input = int;
  using Memory = AvgBank::Memory;
  using Output = std::optional<std::size_t>;
  using Message = AvgBank::Message;

  struct ClauseRef {
    std::size_t level = 0;
    std::vector<std::size_t> comparisons;
  };

  CompiledProtocol(LevelSetSpec spec, int h_max);

  const LevelSetSpec& spec() const { return *spec_; }
  const std::vector<IntegerComparison>& comparisons() const { return comparisons_; }
  const std::vector<ClauseRef>& clauses() const { return clauses_; }
  const AvgBank& bank() const { return bank_; }
  const std::string& label(std::size_t level) const { return spec_->levels[level].label; }

  /// Label index from per-comparison averaging outputs; empty while any
  /// comparison is undecided.
  Output decide(const AvgBank::Output& averages) const;

  void transition(const NodeState<CompiledProtocol>& current, const Inbox<Message>& inbox,
                  NodeState<CompiledProtocol>& next) const;

 private:
  std::shared_ptr<const LevelSetSpec> spec_;
  std::vector<IntegerComparison> comparisons_;
  std::vector<ClauseRef> clauses_;
  AvgBank bank_;
};

/// Validates coverage (throws CoverageError) and builds the protocol.
CompiledProtocol compile(const LevelSetSpec& spec, int h_max, int denominator_bound = 12);

std::int64_t pebble_total(const Configuration<CompiledProtocol>& config, const CompiledProtocol& protocol,
                          std::size_t component);

// ---- spec builders --------------------------------------------------------

/// p1 <= 1/2 over {0,1}: levels "le_half", "gt_half".
LevelSetSpec majority_spec();
/// p1 >= 3/4 over {0,1}: levels "accept", "reject".
LevelSetSpec weighted_majority_spec();
/// Values 1, 2 vote, 3 abstains; p1 - p2 >= 0: levels "first", "second".
LevelSetSpec abstain_majority_spec();
/// Values 1..options; outputs the value ranked `rank` by frequency, ties
/// broken toward the smaller value. Labels are the values.
LevelSetSpec rank_spec(int options, int rank);
/// sum_{I} p >= sum_{I'} p: levels "yes", "no".
LevelSetSpec subset_spec(int alphabet_max, const std::vector<int>& first, const std::vector<int>& second);
/// Membership of the mean value sum_k k p_k in Y; labels "{v}" and "(v,v+1)".
LevelSetSpec average_membership_spec(int alphabet_max);

using Sampler = std::function<Rational(const ProportionVector&)>;

struct QuantizeOptions {
  Rational lower = 0;
  Rational upper = 1;
  Rational epsilon = Rational(1, 4);
  int grid = 8;
  int alphabet_max = 1;
};

/// Piecewise-constant approximation of a continuous h on a grid of side
/// 1/grid over (p_1..p_K), each cell valued L + eps*round((h - L)/eps). The
/// sup-norm error depends on h's modulus of continuity, which the caller must
/// account for. Labels are the values as "num/den".
LevelSetSpec quantize_continuous(const Sampler& h, const QuantizeOptions& options);

struct Box {
  std::vector<Rational> lower;  ///< per p_1..p_K, open
  std::vector<Rational> upper;
  Rational weight;
};

/// sum_i weight_i * 1_{B_i} over open rational boxes. Expands to one clause
/// per membership pattern, so keep the box count small.
LevelSetSpec box_function(int alphabet_max, const std::vector<Box>& boxes);

}  // namespace anoncomp
