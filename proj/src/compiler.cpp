#include "anoncomp/compiler.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <numeric>
#include <set>

namespace anoncomp {

std::string to_string(const ProportionVector& p) {
  std::string text = "(";
  for (std::size_t v = 0; v < p.p.size(); ++v) {
    if (v) text += ", ";
    text += to_string(p.p[v]);
  }
  return text + ")";
}

bool holds(const RationalInequality& inequality, const ProportionVector& p) {
  if (inequality.coefficients.size() + 1 > p.p.size()) {
    throw SpecError("inequality mentions p" + std::to_string(inequality.coefficients.size()) +
                    " but the alphabet ends at " + std::to_string(p.alphabet_max()));
  }
  Rational lhs = 0;
  for (std::size_t k = 1; k <= inequality.coefficients.size(); ++k) lhs += inequality.coefficients[k - 1] * p[k];
  return inequality.strict ? lhs < inequality.threshold : lhs <= inequality.threshold;
}

std::int64_t IntegerComparison::q_cap() const { return std::accumulate(beta.begin(), beta.end(), std::int64_t{0}); }

std::vector<int> IntegerComparison::positive_set() const {
  std::vector<int> set;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (positive[k] && beta[k] != 0) set.push_back(static_cast<int>(k + 1));
  }
  return set;
}

IntegerComparison normalize_inequality(const RationalInequality& inequality) {
  std::int64_t scale = inequality.threshold.denominator();
  for (const auto& c : inequality.coefficients) scale = std::lcm(scale, c.denominator());

  IntegerComparison cmp;
  cmp.strict = inequality.strict;
  const std::int64_t cleared_threshold =
      inequality.threshold.numerator() * (scale / inequality.threshold.denominator());
  std::int64_t complement = 0;
  for (const auto& c : inequality.coefficients) {
    const std::int64_t cleared = c.numerator() * (scale / c.denominator());
    cmp.beta.push_back(cleared < 0 ? -cleared : cleared);
    cmp.positive.push_back(cleared >= 0);
    if (cleared < 0) complement += -cleared;
  }
  cmp.q_star = cleared_threshold + complement;
  return cmp;
}

std::int64_t encode_local(int x, const IntegerComparison& comparison) {
  std::int64_t q = 0;
  for (std::size_t k = 1; k <= comparison.beta.size(); ++k) {
    const bool chi = x == static_cast<int>(k);
    if (comparison.positive[k - 1]) {
      q += chi ? comparison.beta[k - 1] : 0;
    } else {
      q += chi ? 0 : comparison.beta[k - 1];
    }
  }
  return q;
}

std::optional<bool> decide_comparison(const std::optional<IntervalValue>& average, const IntegerComparison& comparison) {
  if (!average) return std::nullopt;
  const std::int64_t v = average->lower;
  if (average->is_singleton()) return comparison.strict ? v < comparison.q_star : v <= comparison.q_star;
  // the true mean lies strictly inside (v, v+1) and q* is an integer
  return v + 1 <= comparison.q_star;
}

bool clause_holds(const Clause& clause, const ProportionVector& p) {
  return std::all_of(clause.all_of.begin(), clause.all_of.end(),
                     [&](const RationalInequality& inequality) { return holds(inequality, p); });
}

std::optional<std::size_t> first_match(const LevelSetSpec& spec, const ProportionVector& p) {
  for (std::size_t level = 0; level < spec.levels.size(); ++level) {
    for (const auto& clause : spec.levels[level].any_of) {
      if (clause_holds(clause, p)) return level;
    }
  }
  return std::nullopt;
}

void for_each_proportion(int alphabet_max, int min_value, int n,
                         const std::function<void(const ProportionVector&)>& fn) {
  if (n <= 0) throw std::invalid_argument("proportion denominator must be positive");
  std::vector<int> counts(static_cast<std::size_t>(alphabet_max) + 1, 0);
  ProportionVector p;
  p.p.assign(counts.size(), Rational(0));
  std::function<void(int, int)> assign = [&](int value, int remaining) {
    if (value == alphabet_max) {
      counts[value] = remaining;
      for (std::size_t v = 0; v < counts.size(); ++v) p.p[v] = Rational(counts[v], n);
      fn(p);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[value] = c;
      assign(value + 1, remaining - c);
    }
  };
  for (int v = 0; v < min_value; ++v) counts[v] = 0;
  assign(min_value, n);
}

namespace {

void check_structure(const LevelSetSpec& spec) {
  if (spec.alphabet_max < 1) throw SpecError("alphabet must contain at least the values 0 and 1");
  if (spec.min_value < 0 || spec.min_value > spec.alphabet_max) throw SpecError("support start outside the alphabet");
  if (spec.levels.empty()) throw SpecError("spec has no levels");
  std::set<std::string> labels;
  for (const auto& level : spec.levels) {
    if (level.label.empty()) throw SpecError("level with empty label");
    if (!labels.insert(level.label).second) throw SpecError("duplicate level label '" + level.label + "'");
    for (const auto& clause : level.any_of) {
      for (const auto& inequality : clause.all_of) {
        if (static_cast<int>(inequality.coefficients.size()) > spec.alphabet_max) {
          throw SpecError("level '" + level.label + "' uses a value beyond the alphabet");
        }
      }
    }
  }
}

}  // namespace

ValidationReport validate(const LevelSetSpec& spec, int denominator_bound) {
  check_structure(spec);
  ValidationReport report;
  for (int n = 1; n <= denominator_bound; ++n) {
    for_each_proportion(spec.alphabet_max, spec.min_value, n, [&](const ProportionVector& p) {
      ++report.points_checked;
      std::optional<std::size_t> matched;
      bool overlap = false;
      for (std::size_t level = 0; level < spec.levels.size(); ++level) {
        const auto& clauses = spec.levels[level].any_of;
        if (std::any_of(clauses.begin(), clauses.end(), [&](const Clause& c) { return clause_holds(c, p); })) {
          if (matched) {
            overlap = true;
          } else {
            matched = level;
          }
        }
      }
      if (!matched) report.uncovered.push_back(p);
      if (overlap) report.overlaps.push_back(p);
    });
  }
  return report;
}

CompiledProtocol::CompiledProtocol(LevelSetSpec spec, int h_max)
    : spec_(std::make_shared<const LevelSetSpec>(std::move(spec))) {
  check_structure(*spec_);
  for (std::size_t level = 0; level < spec_->levels.size(); ++level) {
    for (const auto& clause : spec_->levels[level].any_of) {
      ClauseRef ref{level, {}};
      for (const auto& inequality : clause.all_of) {
        const IntegerComparison cmp = normalize_inequality(inequality);
        auto found = std::find(comparisons_.begin(), comparisons_.end(), cmp);
        if (found == comparisons_.end()) {
          if (cmp.q_cap() > INT_MAX / 2) throw SpecError("comparison alphabet too large after clearing denominators");
          comparisons_.push_back(cmp);
          found = comparisons_.end() - 1;
        }
        ref.comparisons.push_back(static_cast<std::size_t>(found - comparisons_.begin()));
      }
      clauses_.push_back(std::move(ref));
    }
  }
  for (const auto& cmp : comparisons_) {
    bank_.add(AveragingProtocol(AvgParams{static_cast<int>(cmp.q_cap()), h_max}),
              [cmp](const int& x) { return static_cast<int>(encode_local(x, cmp)); });
  }
}

CompiledProtocol::Output CompiledProtocol::decide(const AvgBank::Output& averages) const {
  if (averages.size() != comparisons_.size()) return std::nullopt;
  std::vector<bool> verdict(comparisons_.size());
  for (std::size_t c = 0; c < comparisons_.size(); ++c) {
    const auto decided = decide_comparison(averages[c], comparisons_[c]);
    if (!decided) return std::nullopt;
    verdict[c] = *decided;
  }
  for (const auto& clause : clauses_) {
    if (std::all_of(clause.comparisons.begin(), clause.comparisons.end(), [&](std::size_t c) { return verdict[c]; })) {
      return clause.level;
    }
  }
  return std::nullopt;
}

void CompiledProtocol::transition(const NodeState<CompiledProtocol>& current, const Inbox<Message>& inbox,
                                  NodeState<CompiledProtocol>& next) const {
  NodeState<AvgBank> bank_current;
  bank_current.x = current.x;
  bank_current.z = current.z;
  for (const auto& memory : current.z) bank_current.y.push_back(memory ? memory->y : std::nullopt);
  bank_current.out = current.out;

  NodeState<AvgBank> bank_next;
  bank_next.x = current.x;
  bank_next.out.assign(inbox.degree(), Message{});
  bank_.transition(bank_current, inbox, bank_next);

  next.y = decide(bank_next.y);
  next.z = std::move(bank_next.z);
  next.out = std::move(bank_next.out);
}

CompiledProtocol compile(const LevelSetSpec& spec, int h_max, int denominator_bound) {
  const ValidationReport report = validate(spec, denominator_bound);
  if (!report.covered()) {
    throw CoverageError("no level matches proportion vector " + to_string(report.uncovered.front()));
  }
  return CompiledProtocol(spec, h_max);
}

std::int64_t pebble_total(const Configuration<CompiledProtocol>& config, const CompiledProtocol& protocol,
                          std::size_t component) {
  const IntegerComparison& cmp = protocol.comparisons().at(component);
  std::int64_t total = 0;
  std::vector<AvgMessage> out;
  for (const auto& node : config.nodes) {
    out.clear();
    for (const auto& port : node.out) {
      if (component < port.size()) out.push_back(port[component]);
    }
    const std::optional<AvgNodeState> memory =
        component < node.z.size() ? node.z[component] : std::optional<AvgNodeState>{};
    total += pebbles(memory, static_cast<int>(encode_local(node.x, cmp)), out);
  }
  return total;
}

// ---- builders ---------------------------------------------------------------

namespace {

RationalInequality inequality(std::vector<Rational> coefficients, Rational threshold, bool strict) {
  return RationalInequality{std::move(coefficients), threshold, strict};
}

std::vector<Rational> unit(int alphabet_max, int k, Rational c) {
  std::vector<Rational> coefficients(static_cast<std::size_t>(alphabet_max), Rational(0));
  coefficients[k - 1] = c;
  return coefficients;
}

}  // namespace

LevelSetSpec majority_spec() {
  LevelSetSpec spec;
  spec.alphabet_max = 1;
  spec.levels.push_back({"le_half", {Clause{{inequality(unit(1, 1, 1), Rational(1, 2), false)}}}});
  spec.levels.push_back({"gt_half", {Clause{{inequality(unit(1, 1, -1), Rational(-1, 2), true)}}}});
  return spec;
}

LevelSetSpec weighted_majority_spec() {
  LevelSetSpec spec;
  spec.alphabet_max = 1;
  spec.levels.push_back({"accept", {Clause{{inequality(unit(1, 1, -1), Rational(-3, 4), false)}}}});
  spec.levels.push_back({"reject", {Clause{{inequality(unit(1, 1, 1), Rational(3, 4), true)}}}});
  return spec;
}

LevelSetSpec abstain_majority_spec() {
  LevelSetSpec spec;
  spec.alphabet_max = 3;
  spec.min_value = 1;
  // p1 - p2 >= 0  is  p2 - p1 <= 0
  spec.levels.push_back({"first", {Clause{{inequality({Rational(-1), Rational(1), Rational(0)}, 0, false)}}}});
  spec.levels.push_back({"second", {Clause{{inequality({Rational(1), Rational(-1), Rational(0)}, 0, true)}}}});
  return spec;
}

LevelSetSpec rank_spec(int options, int rank) {
  if (options < 2 || rank < 1 || rank > options) throw SpecError("rank must lie in 1..options");
  LevelSetSpec spec;
  spec.alphabet_max = options;
  spec.min_value = 1;
  for (int v = 1; v <= options; ++v) spec.levels.push_back({std::to_string(v), {}});

  std::vector<int> order(static_cast<std::size_t>(options));
  std::iota(order.begin(), order.end(), 1);
  do {
    Clause clause;
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      const int a = order[j];
      const int b = order[j + 1];
      // p_a >= p_b (strict when the tie-break would put b first): p_b - p_a <= 0
      auto coefficients = unit(options, b, 1);
      coefficients[a - 1] = -1;
      clause.all_of.push_back(inequality(std::move(coefficients), 0, a > b));
    }
    spec.levels[order[rank - 1] - 1].any_of.push_back(std::move(clause));
  } while (std::next_permutation(order.begin(), order.end()));
  return spec;
}

LevelSetSpec subset_spec(int alphabet_max, const std::vector<int>& first, const std::vector<int>& second) {
  std::vector<Rational> diff(static_cast<std::size_t>(alphabet_max), Rational(0));
  for (int k : first) {
    if (k < 1 || k > alphabet_max) throw SpecError("subset value outside 1..K");
    diff[k - 1] += 1;
  }
  for (int k : second) {
    if (k < 1 || k > alphabet_max) throw SpecError("subset value outside 1..K");
    diff[k - 1] -= 1;
  }
  std::vector<Rational> negated;
  for (const auto& c : diff) negated.push_back(-c);
  LevelSetSpec spec;
  spec.alphabet_max = alphabet_max;
  spec.levels.push_back({"yes", {Clause{{inequality(negated, 0, false)}}}});
  spec.levels.push_back({"no", {Clause{{inequality(diff, 0, true)}}}});
  return spec;
}

LevelSetSpec average_membership_spec(int alphabet_max) {
  std::vector<Rational> mean;
  std::vector<Rational> neg_mean;
  for (int k = 1; k <= alphabet_max; ++k) {
    mean.emplace_back(k);
    neg_mean.emplace_back(-k);
  }
  LevelSetSpec spec;
  spec.alphabet_max = alphabet_max;
  for (int v = 0; v <= alphabet_max; ++v) {
    spec.levels.push_back({to_string(IntervalValue::point(v)),
                           {Clause{{inequality(mean, v, false), inequality(neg_mean, -v, false)}}}});
    if (v < alphabet_max) {
      spec.levels.push_back({to_string(IntervalValue::between(v)),
                             {Clause{{inequality(neg_mean, -v, true), inequality(mean, v + 1, true)}}}});
    }
  }
  return spec;
}

LevelSetSpec quantize_continuous(const Sampler& h, const QuantizeOptions& options) {
  if (options.grid <= 0) throw SpecError("grid resolution must be positive");
  if (options.epsilon <= 0) throw SpecError("epsilon must be positive");
  if (options.upper < options.lower) throw SpecError("empty value range");
  if (options.alphabet_max < 1) throw SpecError("alphabet must contain at least the values 0 and 1");
  const int K = options.alphabet_max;
  const int g = options.grid;
  const Rational side(1, g);
  const std::int64_t top_step = floor((options.upper - options.lower) / options.epsilon);

  std::map<Rational, std::vector<Clause>> cells;
  std::vector<int> j(static_cast<std::size_t>(K), 0);
  for (;;) {
    const int sum = std::accumulate(j.begin(), j.end(), 0);
    if (sum <= g) {
      // representative point: the cell center, pulled toward the lower corner
      // along the diagonal until it lies in D
      const Rational slack = (Rational(1) - Rational(sum, g)) / K;
      const Rational delta = std::min(side / 2, slack);
      ProportionVector p;
      p.p.assign(static_cast<std::size_t>(K) + 1, Rational(0));
      Rational used = 0;
      for (int k = 1; k <= K; ++k) {
        p.p[k] = Rational(j[k - 1], g) + delta;
        used += p.p[k];
      }
      p.p[0] = Rational(1) - used;

      std::int64_t step = round_half_up((h(p) - options.lower) / options.epsilon);
      step = std::clamp<std::int64_t>(step, 0, top_step);
      const Rational value = options.lower + options.epsilon * Rational(step);

      Clause clause;
      for (int k = 1; k <= K; ++k) {
        if (j[k - 1] > 0) clause.all_of.push_back(inequality(unit(K, k, -1), -Rational(j[k - 1], g), false));
        if (j[k - 1] < g - 1) clause.all_of.push_back(inequality(unit(K, k, 1), Rational(j[k - 1] + 1, g), true));
      }
      cells[value].push_back(std::move(clause));
    }
    int k = 0;
    while (k < K && ++j[k] == g) j[k++] = 0;
    if (k == K) break;
  }

  LevelSetSpec spec;
  spec.alphabet_max = K;
  for (auto& [value, clauses] : cells) spec.levels.push_back({to_string(value), std::move(clauses)});
  return spec;
}

LevelSetSpec box_function(int alphabet_max, const std::vector<Box>& boxes) {
  const int K = alphabet_max;
  if (boxes.size() > 8) throw SpecError("box_function expands exponentially; at most 8 boxes");
  for (const auto& box : boxes) {
    if (static_cast<int>(box.lower.size()) != K || static_cast<int>(box.upper.size()) != K) {
      throw SpecError("box dimension does not match the alphabet");
    }
  }
  std::map<Rational, std::vector<Clause>> levels;
  const std::size_t patterns = std::size_t{1} << boxes.size();
  for (std::size_t pattern = 0; pattern < patterns; ++pattern) {
    Rational value = 0;
    Clause inside;
    std::vector<std::size_t> outside;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      if (pattern & (std::size_t{1} << b)) {
        value += boxes[b].weight;
        for (int k = 1; k <= K; ++k) {
          inside.all_of.push_back(inequality(unit(K, k, -1), -boxes[b].lower[k - 1], true));
          inside.all_of.push_back(inequality(unit(K, k, 1), boxes[b].upper[k - 1], true));
        }
      } else {
        outside.push_back(b);
      }
    }
    // leaving an open box means crossing one of its 2K facets
    std::vector<std::size_t> choice(outside.size(), 0);
    for (;;) {
      Clause clause = inside;
      for (std::size_t o = 0; o < outside.size(); ++o) {
        const Box& box = boxes[outside[o]];
        const int k = static_cast<int>(choice[o] / 2) + 1;
        if (choice[o] % 2 == 0) {
          clause.all_of.push_back(inequality(unit(K, k, 1), box.lower[k - 1], false));
        } else {
          clause.all_of.push_back(inequality(unit(K, k, -1), -box.upper[k - 1], false));
        }
      }
      levels[value].push_back(std::move(clause));
      std::size_t o = 0;
      while (o < choice.size() && ++choice[o] == static_cast<std::size_t>(2 * K)) choice[o++] = 0;
      if (o == choice.size()) break;
    }
  }
  LevelSetSpec spec;
  spec.alphabet_max = K;
  for (auto& [value, clauses] : levels) spec.levels.push_back({to_string(value), std::move(clauses)});
  return spec;
}

}  // namespace anoncomp
