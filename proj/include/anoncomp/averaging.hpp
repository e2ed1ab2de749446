#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "anoncomp/engine.hpp"
#include "anoncomp/extrema.hpp"
#include "anoncomp/rational.hpp"

namespace anoncomp {

/// A member of Y = {{0}, (0,1), {1}, ..., (K-1,K), {K}}.
struct IntervalValue {
  enum class Kind : std::uint8_t { singleton, open };

  Kind kind = Kind::singleton;
  int lower = 0;

  static IntervalValue point(int v) { return {Kind::singleton, v}; }
  static IntervalValue between(int v) { return {Kind::open, v}; }

  bool is_singleton() const { return kind == Kind::singleton; }
  bool contains(const Rational& value) const;

  bool operator==(const IntervalValue&) const = default;
};

std::ostream& operator<<(std::ostream& os, const IntervalValue& v);
std::string to_string(const IntervalValue& v);

enum class Mode : std::uint8_t { free, blocked };

/// One wire message of the averaging protocol: both tracker reports plus at
/// most one Request and one Accept. Accept(0) is a denial.
struct AvgMessage {
  std::optional<TrackerMessage> max_report;
  std::optional<TrackerMessage> min_report;
  std::optional<int> request;
  std::optional<int> accept;

  bool operator==(const AvgMessage&) const = default;
};

std::ostream& operator<<(std::ostream& os, const AvgMessage& m);

/// rin is kSelf when this node originated the outstanding request.
struct AvgNodeState {
  int u = 0;
  Mode mode = Mode::free;
  std::optional<Port> rin;
  std::optional<Port> rout;
  TrackerState max_tracker;
  TrackerState min_tracker;
  std::optional<IntervalValue> y;

  bool operator==(const AvgNodeState&) const = default;
};

std::ostream& operator<<(std::ostream& os, const AvgNodeState& s);

struct AvgParams {
  /// Largest pebble count a node can hold (the alphabet bound of u).
  int q_cap = 0;
  int h_max = 1 << 16;
};

AvgNodeState avg_init(std::size_t degree, int x, const AvgParams& params);
/// First round: avg_init plus the opening tracker reports on every port.
AvgNodeState avg_start(int x, const AvgParams& params, std::span<AvgMessage> out);

/// One round of the pebble exchange, in order: tracker update, serve one
/// Request, settle an arriving Accept, originate a Request, decode the output.
/// Writes the outgoing message for each port into `out`.
AvgNodeState avg_transition(const AvgNodeState& state, const Inbox<AvgMessage>& inbox, const AvgParams& params,
                            std::span<AvgMessage> out);

/// {M} when the estimates agree, (m, m+1) when they differ by one, empty
/// otherwise (still converging).
std::optional<IntervalValue> decode_output(int u, int max_estimate, int min_estimate);

class AveragingProtocol {
 public:
  using Input = int;
  using Memory = std::optional<AvgNodeState>;
  using Output = std::optional<IntervalValue>;
  using Message = AvgMessage;

  explicit AveragingProtocol(AvgParams params) : params_(params) {}
  const AvgParams& params() const { return params_; }

  void transition(const NodeState<AveragingProtocol>& current, const Inbox<Message>& inbox,
                  NodeState<AveragingProtocol>& next) const;

 private:
  AvgParams params_;
};

/// Pebbles attributable to one node: its count plus every Accept it is
/// currently sending. Before the first round this is x.
std::int64_t pebbles(const std::optional<AvgNodeState>& memory, int x, std::span<const AvgMessage> out);
std::int64_t pebble_total(const Configuration<AveragingProtocol>& config);

}  // namespace anoncomp
