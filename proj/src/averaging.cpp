#include "anoncomp/averaging.hpp"

#include <sstream>

namespace anoncomp {

bool IntervalValue::contains(const Rational& value) const {
  if (is_singleton()) return value == Rational(lower);
  return value > Rational(lower) && value < Rational(lower + 1);
}

std::ostream& operator<<(std::ostream& os, const IntervalValue& v) {
  if (v.is_singleton()) return os << '{' << v.lower << '}';
  return os << '(' << v.lower << ',' << v.lower + 1 << ')';
}

std::string to_string(const IntervalValue& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const AvgMessage& m) {
  os << '<';
  if (m.max_report) os << "max" << *m.max_report;
  if (m.min_report) os << " min" << *m.min_report;
  if (m.request) os << " req" << *m.request;
  if (m.accept) os << " acc" << *m.accept;
  return os << '>';
}

std::ostream& operator<<(std::ostream& os, const AvgNodeState& s) {
  auto pointer = [&](const std::optional<Port>& p) -> std::ostream& {
    if (!p) return os << '-';
    if (*p == kSelf) return os << "self";
    return os << *p;
  };
  os << "u=" << s.u << ' ' << (s.mode == Mode::free ? "free" : "blocked") << " Rin=";
  pointer(s.rin) << " Rout=";
  pointer(s.rout) << " max[" << s.max_tracker << "] min[" << s.min_tracker << "] y=";
  if (s.y) return os << *s.y;
  return os << '-';
}

std::optional<IntervalValue> decode_output(int /*u*/, int max_estimate, int min_estimate) {
  if (max_estimate == min_estimate) return IntervalValue::point(max_estimate);
  if (max_estimate == min_estimate + 1) return IntervalValue::between(min_estimate);
  return std::nullopt;
}

AvgNodeState avg_init(std::size_t /*degree*/, int x, const AvgParams& params) {
  if (x < 0 || x > params.q_cap) {
    throw std::invalid_argument("initial value " + std::to_string(x) + " outside 0.." + std::to_string(params.q_cap));
  }
  AvgNodeState s;
  s.u = x;
  s.max_tracker = tracker_init(x);
  s.min_tracker = tracker_init(x);
  s.y = decode_output(x, x, x);
  return s;
}

AvgNodeState avg_start(int x, const AvgParams& params, std::span<AvgMessage> out) {
  AvgNodeState state = avg_init(out.size(), x, params);
  for (auto& m : out) {
    m = AvgMessage{};
    m.max_report = tracker_report(state.max_tracker);
    m.min_report = tracker_report(state.min_tracker);
  }
  return state;
}

namespace {

void put_accept(std::span<AvgMessage> out, Port port, int w) {
  auto& slot = out[port - 1].accept;
  if (slot) throw ProtocolViolation("two Accept messages scheduled on port " + std::to_string(port));
  slot = w;
}

}  // namespace

AvgNodeState avg_transition(const AvgNodeState& state, const Inbox<AvgMessage>& inbox, const AvgParams& params,
                            std::span<AvgMessage> out) {
  const std::size_t d = inbox.degree();
  if (out.size() != d) throw ProtocolFault("outgoing span does not match degree");
  for (auto& m : out) m = AvgMessage{};
  AvgNodeState next = state;

  // (1) trackers see the pebble count held at the start of the round
  next.max_tracker = tracker_transition(
      state.max_tracker, state.u, d, [&](Port k) -> const auto& { return inbox[k].max_report; }, params.h_max,
      Extremum::max);
  next.min_tracker = tracker_transition(
      state.min_tracker, state.u, d, [&](Port k) -> const auto& { return inbox[k].min_report; }, params.h_max,
      Extremum::min);
  const int top = next.max_tracker.estimate;
  const Port toward_top = next.max_tracker.parent;

  // (2) serve the lowest-port Request, deny the rest
  bool served = false;
  for (Port k = 1; k <= d; ++k) {
    const auto& request = inbox[k].request;
    if (!request) continue;
    const int r = *request;
    if (r < 0 || r > params.q_cap) {
      throw ProtocolViolation("Request(" + std::to_string(r) + ") on port " + std::to_string(k) + " outside alphabet");
    }
    if (served) {
      put_accept(out, k, 0);
      continue;
    }
    served = true;
    if (next.u >= r + 2) {
      const int w = (next.u - r) / 2;
      next.u -= w;
      put_accept(out, k, w);
    } else if (next.mode == Mode::free && toward_top != kSelf && toward_top != k && top > r + 1) {
      out[toward_top - 1].request = r;
      next.mode = Mode::blocked;
      next.rin = k;
      next.rout = toward_top;
    } else {
      put_accept(out, k, 0);
    }
  }

  // (3) an Accept closes this node's outstanding transaction
  bool accepted = false;
  for (Port k = 1; k <= d; ++k) {
    const auto& accept = inbox[k].accept;
    if (!accept) continue;
    if (state.mode != Mode::blocked || state.rout != k || accepted) {
      throw ProtocolViolation("unexpected Accept(" + std::to_string(*accept) + ") on port " + std::to_string(k));
    }
    accepted = true;
    if (*state.rin == kSelf) {
      next.u += *accept;
    } else {
      put_accept(out, *state.rin, *accept);
    }
    next.mode = Mode::free;
    next.rin.reset();
    next.rout.reset();
  }

  // (4) originate when a node with at least u+2 pebbles is believed to exist
  if (next.mode == Mode::free && toward_top != kSelf && top >= next.u + 2) {
    out[toward_top - 1].request = next.u;
    next.mode = Mode::blocked;
    next.rin = kSelf;
    next.rout = toward_top;
  }

  // (5)
  next.y = decode_output(next.u, top, next.min_tracker.estimate);

  const TrackerMessage max_report = tracker_report(next.max_tracker);
  const TrackerMessage min_report = tracker_report(next.min_tracker);
  for (auto& m : out) {
    m.max_report = max_report;
    m.min_report = min_report;
  }
  return next;
}

void AveragingProtocol::transition(const NodeState<AveragingProtocol>& current, const Inbox<Message>& inbox,
                                   NodeState<AveragingProtocol>& next) const {
  AvgNodeState state;
  if (!current.z) {
    state = avg_start(current.x, params_, next.out);
  } else {
    state = avg_transition(*current.z, inbox, params_, next.out);
  }
  next.y = state.y;
  next.z = std::move(state);
}

std::int64_t pebbles(const std::optional<AvgNodeState>& memory, int x, std::span<const AvgMessage> out) {
  std::int64_t total = memory ? memory->u : x;
  for (const auto& m : out) {
    if (m.accept) total += *m.accept;
  }
  return total;
}

std::int64_t pebble_total(const Configuration<AveragingProtocol>& config) {
  std::int64_t total = 0;
  for (const auto& node : config.nodes) total += pebbles(node.z, node.x, node.out);
  return total;
}

}  // namespace anoncomp
