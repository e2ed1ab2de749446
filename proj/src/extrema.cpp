#include "anoncomp/extrema.hpp"

#include <algorithm>
#include <cmath>

namespace anoncomp {

std::ostream& operator<<(std::ostream& os, const TrackerMessage& m) {
  return os << '(' << m.estimate << ',' << m.hops << ')';
}

std::ostream& operator<<(std::ostream& os, const TrackerState& s) {
  os << "u=" << s.u << " M=" << s.estimate << " P=";
  if (s.parent == kSelf) {
    os << "self";
  } else {
    os << s.parent;
  }
  return os << " h=" << s.hops;
}

TrackerState tracker_init(int u0) { return TrackerState{u0, u0, kSelf, 0}; }

TrackerState tracker_transition(const TrackerState& state, int new_input,
                                std::span<const std::optional<TrackerMessage>> incoming, int h_max, Extremum order) {
  return tracker_transition(
      state, new_input, incoming.size(), [&](Port k) -> const std::optional<TrackerMessage>& { return incoming[k - 1]; },
      h_max, order);
}

NodeId pointer_chain(const PortLabeledGraph& graph, std::span<const TrackerState> snapshot, NodeId start) {
  NodeId node = start;
  for (std::size_t steps = 0; steps <= graph.size(); ++steps) {
    const TrackerState& s = snapshot[node];
    if (s.parent == kSelf) return node;
    if (s.parent > graph.degree(node)) {
      throw ProtocolViolation("node " + std::to_string(node) + " points at missing port " + std::to_string(s.parent));
    }
    const NodeId next = graph.neighbor(node, s.parent);
    if (snapshot[next].hops >= s.hops) {
      throw ProtocolViolation("pointer chain from node " + std::to_string(start) + " does not decrease hops at node " +
                              std::to_string(node));
    }
    node = next;
  }
  throw ProtocolViolation("pointer chain from node " + std::to_string(start) + " exceeds the node count");
}

void TrackerProtocol::transition(const NodeState<TrackerProtocol>& current, const Inbox<Message>& inbox,
                                 NodeState<TrackerProtocol>& next) const {
  TrackerState state;
  if (!current.z) {
    state = tracker_init(current.x);
  } else {
    state = tracker_transition(
        *current.z, current.z->u, inbox.degree(), [&](Port k) -> const Message& { return inbox[k]; }, params_.h_max,
        params_.order);
  }
  next.z = state;
  next.y = state.estimate;
  for (auto& m : next.out) m = tracker_report(state);
}

ScheduledInputs::ScheduledInputs(std::span<const InputChange> changes) : changes_(changes.begin(), changes.end()) {
  std::stable_sort(changes_.begin(), changes_.end(), [](const auto& a, const auto& b) { return a.round < b.round; });
  for (const auto& change : changes_) {
    if (change.round == 0) throw std::invalid_argument("input changes start at round 1");
    last_round_ = std::max(last_round_, change.round);
  }
}

bool ScheduledInputs::operator()(Configuration<TrackerProtocol>& config) const {
  const std::size_t upcoming = config.round + 1;
  for (const auto& change : changes_) {
    if (change.round != upcoming) continue;
    if (change.node >= config.nodes.size()) throw std::invalid_argument("input change names unknown node");
    auto& memory = config.nodes[change.node].z;
    if (memory) {
      memory->u = change.value;
    } else {
      config.nodes[change.node].x = change.value;
    }
  }
  return upcoming <= last_round_;
}

std::vector<int> ScheduledInputs::final_inputs(std::span<const int> initial) const {
  std::vector<int> inputs(initial.begin(), initial.end());
  for (const auto& change : changes_) {
    if (change.node >= inputs.size()) throw std::invalid_argument("input change names unknown node");
    inputs[change.node] = change.value;
  }
  return inputs;
}

TrackerRun run_tracker(const PortLabeledGraph& graph, std::span<const int> initial, std::span<const InputChange> changes,
                       const TrackerParams& params, const RunOptions& options) {
  const ScheduledInputs hook(changes);
  const std::vector<int> final_inputs = hook.final_inputs(initial);
  TrackerRun run;
  run.result = run_until_quiescent(graph, TrackerProtocol(params), initial, options, hook);
  for (const auto& node : run.result.final.nodes) run.states.push_back(node.z.value_or(TrackerState{}));
  run.truth = params.order == Extremum::max ? *std::max_element(final_inputs.begin(), final_inputs.end())
                                            : *std::min_element(final_inputs.begin(), final_inputs.end());
  return run;
}

StateSizeAudit audit_tracker_state(std::size_t alphabet_size, int h_max, std::size_t degree) {
  auto width = [](double count) { return std::max(1, static_cast<int>(std::ceil(std::log2(count)))); };
  StateSizeAudit audit;
  // u and M share the alphabet; hops need 0..H_max; the parent needs self + d ports.
  audit.bits = 2 * width(static_cast<double>(alphabet_size)) + width(static_cast<double>(h_max) + 1.0) +
               width(static_cast<double>(degree) + 1.0);
  audit.log_terms = std::log2(static_cast<double>(std::max<std::size_t>(alphabet_size, 2))) +
                    std::log2(static_cast<double>(std::max(h_max, 2))) + std::log2(static_cast<double>(degree) + 1.0);
  audit.constant = audit.bits / audit.log_terms;
  return audit;
}

}  // namespace anoncomp
