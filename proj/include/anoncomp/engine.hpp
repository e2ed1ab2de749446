#pragma once

#include <concepts>
#include <cstddef>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anoncomp/graph.hpp"

namespace anoncomp {

/// The automaton broke the engine contract (e.g. wrong number of messages).
class ProtocolFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A protocol invariant was observed broken. Indicates a bug, not a legal
/// runtime event.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Per-node automaton state (x, z, y, m_1..m_d). Default-constructed members
/// are the empty value; every node starts with all of them empty except x.
template <class P>
struct NodeState {
  typename P::Input x{};
  typename P::Memory z{};
  typename P::Output y{};
  std::vector<typename P::Message> out;

  bool operator==(const NodeState&) const = default;
};

/// Read-only view of the messages arriving on ports 1..d. It exposes no
/// neighbor identities.
template <class Message>
class Inbox {
 public:
  Inbox() = default;
  explicit Inbox(std::span<const Message* const> slots) : slots_(slots) {}

  std::size_t degree() const { return slots_.size(); }
  const Message& operator[](Port port) const { return *slots_[port - 1]; }

 private:
  std::span<const Message* const> slots_;
};

/// Owns a set of messages and hands out an Inbox over them; used by tests and
/// by product protocols.
template <class Message>
class InboxBuffer {
 public:
  explicit InboxBuffer(std::vector<Message> messages) : messages_(std::move(messages)) {
    for (const auto& m : messages_) slots_.push_back(&m);
  }
  InboxBuffer(const InboxBuffer&) = delete;
  InboxBuffer& operator=(const InboxBuffer&) = delete;

  Inbox<Message> view() const { return Inbox<Message>(slots_); }

 private:
  std::vector<Message> messages_;
  std::vector<const Message*> slots_;
};

/// A degree-parameterized automaton family. `transition` must be a pure
/// function of (current, inbox): it fills next.z, next.y and next.out
/// (pre-sized to the degree, x already copied).
template <class P>
concept Protocol = requires(const P& protocol, const NodeState<P>& current,
                            const Inbox<typename P::Message>& inbox, NodeState<P>& next) {
  typename P::Input;
  typename P::Memory;
  typename P::Output;
  typename P::Message;
  protocol.transition(current, inbox, next);
};

/// Protocols whose memory never repeats (they keep a clock) report a local
/// "settled" predicate instead of relying on an exact fixed point.
template <class P>
concept SettlingProtocol = Protocol<P> && requires(const P& protocol, const typename P::Memory& memory) {
  { protocol.settled(memory) } -> std::convertible_to<bool>;
};

template <class P>
struct Configuration {
  std::size_t round = 0;
  std::vector<NodeState<P>> nodes;

  bool operator==(const Configuration&) const = default;
};

enum class Execution { serial, parallel };

template <Protocol P>
Configuration<P> initial_configuration(const PortLabeledGraph& graph, std::span<const typename P::Input> x) {
  if (x.size() != graph.size()) {
    throw std::invalid_argument("expected " + std::to_string(graph.size()) + " initial values, got " +
                                std::to_string(x.size()));
  }
  Configuration<P> config;
  config.nodes.resize(graph.size());
  for (NodeId i = 0; i < graph.size(); ++i) {
    config.nodes[i].x = x[i];
    config.nodes[i].out.assign(graph.degree(i), typename P::Message{});
  }
  return config;
}

/// One synchronous round: next is computed from the round-t snapshot `current`
/// only. Serial and parallel execution produce identical results.
template <Protocol P>
void step_into(const Configuration<P>& current, Configuration<P>& next, const PortLabeledGraph& graph,
               const P& protocol, Execution execution = Execution::serial) {
  using Message = typename P::Message;
  const std::size_t n = graph.size();
  if (current.nodes.size() != n) throw std::invalid_argument("configuration does not match graph");

  std::vector<std::size_t> offset(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    if (current.nodes[i].out.size() != graph.degree(i)) {
      throw ProtocolFault("node " + std::to_string(i) + " holds " + std::to_string(current.nodes[i].out.size()) +
                          " outgoing messages but has degree " + std::to_string(graph.degree(i)));
    }
    offset[i + 1] = offset[i] + graph.degree(i);
  }
  std::vector<const Message*> slots(offset[n]);
  next.nodes.resize(n);

  std::exception_ptr failure;
  NodeId failed_node = n;
  const bool parallel = execution == Execution::parallel;

#pragma omp parallel for schedule(static) if (parallel)
  for (NodeId i = 0; i < n; ++i) {
    try {
      const std::size_t d = graph.degree(i);
      for (Port k = 1; k <= d; ++k) {
        const PortEdge& edge = graph.at(i, k);
        slots[offset[i] + k - 1] = &current.nodes[edge.neighbor].out[edge.reverse - 1];
      }
      NodeState<P>& target = next.nodes[i];
      target.x = current.nodes[i].x;
      target.out.assign(d, Message{});
      const Inbox<Message> inbox(std::span<const Message* const>(slots.data() + offset[i], d));
      protocol.transition(current.nodes[i], inbox, target);
      if (target.out.size() != d) {
        throw ProtocolFault("node " + std::to_string(i) + " emitted " + std::to_string(target.out.size()) +
                            " messages but has degree " + std::to_string(d));
      }
    } catch (...) {
#pragma omp critical(anoncomp_step_failure)
      {
        if (i < failed_node) {
          failed_node = i;
          failure = std::current_exception();
        }
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  next.round = current.round + 1;
}

template <Protocol P>
Configuration<P> step(const Configuration<P>& current, const PortLabeledGraph& graph, const P& protocol,
                      Execution execution = Execution::serial) {
  Configuration<P> next;
  step_into(current, next, graph, protocol, execution);
  return next;
}

template <Protocol P>
bool all_settled(const P& protocol, const Configuration<P>& config) {
  for (const auto& node : config.nodes) {
    if (!protocol.settled(node.z)) return false;
  }
  return true;
}

/// Double-buffered driver around step_into.
template <Protocol P>
class Simulator {
 public:
  using Input = typename P::Input;

  Simulator(PortLabeledGraph graph, P protocol, std::span<const Input> x, Execution execution = Execution::serial)
      : graph_(std::move(graph)),
        protocol_(std::move(protocol)),
        execution_(execution),
        current_(initial_configuration<P>(graph_, x)) {}

  const PortLabeledGraph& graph() const { return graph_; }
  const P& protocol() const { return protocol_; }
  std::size_t round() const { return current_.round; }
  const Configuration<P>& configuration() const { return current_; }
  /// Mutable access for harnesses that inject exogenous inputs between rounds.
  Configuration<P>& configuration() { return current_; }

  /// Advances one round. Returns true when the configuration is now
  /// permanent: an exact fixed point, or all nodes settled for clocked
  /// protocols.
  bool step() {
    step_into(current_, next_, graph_, protocol_, execution_);
    bool fixed = false;
    if constexpr (SettlingProtocol<P>) {
      fixed = all_settled(protocol_, next_);
    } else {
      fixed = next_.nodes == current_.nodes;
    }
    std::swap(current_, next_);
    return fixed;
  }

 private:
  PortLabeledGraph graph_;
  P protocol_;
  Execution execution_;
  Configuration<P> current_;
  Configuration<P> next_;
};

struct RunOptions {
  std::size_t max_rounds = 100000;
  bool keep_trace = false;
  Execution execution = Execution::serial;
};

template <Protocol P>
struct RunResult {
  std::vector<typename P::Output> outputs;
  bool quiescent = false;
  std::size_t rounds = 0;
  Configuration<P> final;
  std::vector<Configuration<P>> trace;
};

/// Default exogenous-input hook: nothing changes.
struct NoInputChanges {
  template <class Config>
  bool operator()(Config&) const {
    return false;
  }
};

/// Steps until the configuration stops changing or max_rounds is reached.
/// `before_step` may mutate the configuration (exogenous inputs) and returns
/// true while further changes are still scheduled; quiescence is not declared
/// before it returns false.
template <Protocol P, class Hook = NoInputChanges>
RunResult<P> run_until_quiescent(const PortLabeledGraph& graph, const P& protocol,
                                 std::span<const typename P::Input> x, const RunOptions& options,
                                 Hook before_step = {}) {
  if (options.max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");
  Simulator<P> sim(graph, protocol, x, options.execution);
  RunResult<P> result;
  if (options.keep_trace) result.trace.push_back(sim.configuration());
  for (std::size_t r = 0; r < options.max_rounds; ++r) {
    const bool inputs_pending = before_step(sim.configuration());
    const bool fixed = sim.step();
    if (options.keep_trace) result.trace.push_back(sim.configuration());
    if (fixed && !inputs_pending) {
      result.quiescent = true;
      break;
    }
  }
  result.rounds = sim.round();
  result.final = sim.configuration();
  for (const auto& node : result.final.nodes) result.outputs.push_back(node.y);
  return result;
}

/// Lock-step product of several instances of one protocol inside each node:
/// memories and outputs are paired, per-port messages concatenated. Each
/// component sees the node's x through its own input map.
template <Protocol P>
class Bank {
 public:
  using Input = typename P::Input;
  using Memory = std::vector<typename P::Memory>;
  using Output = std::vector<typename P::Output>;
  using Message = std::vector<typename P::Message>;
  using InputMap = std::function<Input(const Input&)>;

  void add(P component, InputMap map = {}) {
    components_.push_back(std::move(component));
    maps_.push_back(std::move(map));
  }

  std::size_t size() const { return components_.size(); }
  const P& component(std::size_t c) const { return components_[c]; }
  Input component_input(std::size_t c, const Input& x) const { return maps_[c] ? maps_[c](x) : x; }

  void transition(const NodeState<Bank>& current, const Inbox<Message>& inbox, NodeState<Bank>& next) const {
    using SubMessage = typename P::Message;
    static const SubMessage empty{};
    const std::size_t k = components_.size();
    const std::size_t d = inbox.degree();

    next.z.resize(k);
    next.y.resize(k);
    for (auto& port : next.out) port.resize(k);

    NodeState<P> sub_current;
    NodeState<P> sub_next;
    std::vector<const SubMessage*> slots(d);
    for (std::size_t c = 0; c < k; ++c) {
      sub_current.x = component_input(c, current.x);
      sub_current.z = c < current.z.size() ? current.z[c] : typename P::Memory{};
      sub_current.y = c < current.y.size() ? current.y[c] : typename P::Output{};
      sub_current.out.resize(d);
      for (Port p = 1; p <= d; ++p) {
        const auto& own = current.out[p - 1];
        sub_current.out[p - 1] = c < own.size() ? own[c] : empty;
        const auto& arriving = inbox[p];
        slots[p - 1] = c < arriving.size() ? &arriving[c] : &empty;
      }
      sub_next.x = sub_current.x;
      sub_next.out.assign(d, SubMessage{});
      components_[c].transition(sub_current, Inbox<SubMessage>(slots), sub_next);
      if (sub_next.out.size() != d) throw ProtocolFault("bank component emitted wrong number of messages");
      next.z[c] = std::move(sub_next.z);
      next.y[c] = std::move(sub_next.y);
      for (Port p = 1; p <= d; ++p) next.out[p - 1][c] = std::move(sub_next.out[p - 1]);
    }
  }

  bool settled(const Memory& memory) const
    requires SettlingProtocol<P>
  {
    if (memory.size() != components_.size()) return false;
    for (std::size_t c = 0; c < memory.size(); ++c) {
      if (!components_[c].settled(memory[c])) return false;
    }
    return true;
  }

 private:
  std::vector<P> components_;
  std::vector<InputMap> maps_;
};

}  // namespace anoncomp
