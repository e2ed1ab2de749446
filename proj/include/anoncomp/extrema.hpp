#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "anoncomp/engine.hpp"
#include "anoncomp/graph.hpp"

namespace anoncomp {

enum class Extremum { max, min };

/// What a tracker broadcasts on every port: its estimate and its hop count.
struct TrackerMessage {
  int estimate = 0;
  int hops = 0;
  bool operator==(const TrackerMessage&) const = default;
};

/// u is the current input, estimate the believed extremum, parent the port
/// the estimate came from (kSelf when it is the node's own input), hops the
/// distance bound to the node holding it.
struct TrackerState {
  int u = 0;
  int estimate = 0;
  Port parent = kSelf;
  int hops = 0;
  bool operator==(const TrackerState&) const = default;
};

std::ostream& operator<<(std::ostream& os, const TrackerMessage& m);
std::ostream& operator<<(std::ostream& os, const TrackerState& s);

TrackerState tracker_init(int u0);

inline TrackerMessage tracker_report(const TrackerState& state) { return {state.estimate, state.hops}; }

namespace detail {

// Lexicographic preference: best estimate, then fewer hops, then lower port
// (self, port 0, first).
inline bool prefer(Extremum order, int estimate, int hops, Port port, const TrackerState& best) {
  if (estimate != best.estimate) return order == Extremum::max ? estimate > best.estimate : estimate < best.estimate;
  if (hops != best.hops) return hops < best.hops;
  return port < best.parent;
}

}  // namespace detail

/// Adopts the best of the node's own input and every neighbor report whose
/// hop count stays within h_max. `incoming(port)` yields the (possibly empty)
/// report on that port.
template <class Incoming>
TrackerState tracker_transition(const TrackerState& state, int new_input, std::size_t degree, Incoming&& incoming,
                                int h_max, Extremum order = Extremum::max) {
  (void)state;
  TrackerState next{new_input, new_input, kSelf, 0};
  for (Port k = 1; k <= degree; ++k) {
    const std::optional<TrackerMessage>& report = incoming(k);
    if (!report) continue;
    if (report->hops < 0 || report->hops > h_max) {
      throw ProtocolViolation("tracker report on port " + std::to_string(k) + " carries hop count " +
                              std::to_string(report->hops) + " above the cap " + std::to_string(h_max));
    }
    const int hops = report->hops + 1;
    if (hops > h_max) continue;
    if (detail::prefer(order, report->estimate, hops, k, next)) next = {new_input, report->estimate, k, hops};
  }
  return next;
}

TrackerState tracker_transition(const TrackerState& state, int new_input,
                                std::span<const std::optional<TrackerMessage>> incoming, int h_max,
                                Extremum order = Extremum::max);

/// Follows parent pointers from `start` to the node whose parent is itself.
/// Throws ProtocolViolation if hops do not strictly decrease along the chain
/// or it is longer than the node count.
NodeId pointer_chain(const PortLabeledGraph& graph, std::span<const TrackerState> snapshot, NodeId start);

struct TrackerParams {
  int h_max = 1 << 16;
  Extremum order = Extremum::max;
};

/// Stand-alone max (or min) tracker. The input register lives in the memory
/// (TrackerState::u) so a harness can change it between rounds; x is only
/// the value at round 0.
class TrackerProtocol {
 public:
  using Input = int;
  using Memory = std::optional<TrackerState>;
  using Output = std::optional<int>;
  using Message = std::optional<TrackerMessage>;

  explicit TrackerProtocol(TrackerParams params) : params_(params) {}
  const TrackerParams& params() const { return params_; }

  void transition(const NodeState<TrackerProtocol>& current, const Inbox<Message>& inbox,
                  NodeState<TrackerProtocol>& next) const;

 private:
  TrackerParams params_;
};

/// Exogenous input change: node's input becomes `value` at the start of the
/// step that produces round `round` (round >= 1).
struct InputChange {
  std::size_t round = 1;
  NodeId node = 0;
  int value = 0;
};

/// run_until_quiescent hook applying InputChanges; reports inputs pending
/// until the last scheduled change has been applied.
class ScheduledInputs {
 public:
  explicit ScheduledInputs(std::span<const InputChange> changes);
  bool operator()(Configuration<TrackerProtocol>& config) const;
  /// Input each node holds after every change.
  std::vector<int> final_inputs(std::span<const int> initial) const;

 private:
  std::vector<InputChange> changes_;
  std::size_t last_round_ = 0;
};

struct TrackerRun {
  RunResult<TrackerProtocol> result;
  std::vector<TrackerState> states;
  /// True maximum (or minimum) of the final inputs.
  int truth = 0;
};

TrackerRun run_tracker(const PortLabeledGraph& graph, std::span<const int> initial, std::span<const InputChange> changes,
                       const TrackerParams& params, const RunOptions& options);

/// Bit budget of one serialized TrackerState, and the constant C relating it
/// to log2|U| + log2 H_max + log2(d+1).
struct StateSizeAudit {
  int bits = 0;
  double log_terms = 0.0;
  double constant = 0.0;
};

StateSizeAudit audit_tracker_state(std::size_t alphabet_size, int h_max, std::size_t degree);

}  // namespace anoncomp
