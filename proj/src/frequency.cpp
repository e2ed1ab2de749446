#include "anoncomp/frequency.hpp"

#include <stdexcept>

namespace anoncomp {

std::size_t schedule_index(std::size_t t) {
  std::size_t block = 1;
  std::size_t start = 0;
  while (start + block <= t) {
    start += block;
    ++block;
  }
  return t - start + 1;
}

bool InterleavedState::operator==(const InterleavedState& other) const {
  if (clock != other.clock || skipped != other.skipped || instances.size() != other.instances.size()) return false;
  for (std::size_t m = 0; m < instances.size(); ++m) {
    if (instances[m] != other.instances[m] && !(*instances[m] == *other.instances[m])) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const FrequencyReadout& r) {
  return os << to_string(r.value()) << " m=" << r.m;
}

std::ostream& operator<<(std::ostream& os, const InterleavedState& s) {
  os << "t=" << s.clock << " skipped=" << s.skipped;
  for (std::size_t m = 0; m < s.instances.size(); ++m) {
    const InstanceSlot& slot = *s.instances[m];
    os << " | Q" << m + 1 << (slot.stable ? "* " : " ");
    if (slot.state) {
      os << *slot.state;
    } else {
      os << '-';
    }
  }
  return os;
}

std::ostream& operator<<(std::ostream& os, const TaggedMessage& m) {
  if (m.instance == 0) return os << '-';
  return os << 'Q' << m.instance << m.payload;
}

std::optional<FrequencyReadout> readout(const InterleavedState& state) {
  for (std::size_t m = 1; m <= state.instances.size(); ++m) {
    const InstanceSlot& slot = *state.instances[m - 1];
    if (slot.state && slot.state->y && slot.state->y->is_singleton()) {
      return FrequencyReadout{m, slot.state->y->lower};
    }
  }
  return std::nullopt;
}

FrequencyProtocol::FrequencyProtocol(FrequencyParams params) : params_(params) {
  if (params_.m_max == 0) throw std::invalid_argument("m_max must be at least 1");
}

void FrequencyProtocol::transition(const NodeState<FrequencyProtocol>& current, const Inbox<Message>& inbox,
                                   NodeState<FrequencyProtocol>& next) const {
  const std::size_t d = inbox.degree();
  InterleavedState state = current.z.value_or(InterleavedState{});

  // slots this round writes to, copied out of the shared previous state once
  std::vector<std::pair<std::size_t, std::shared_ptr<InstanceSlot>>> touched;
  auto writable = [&](std::size_t m) -> InstanceSlot& {
    for (auto& [index, slot] : touched) {
      if (index == m) return *slot;
    }
    auto copy = std::make_shared<InstanceSlot>(*state.instances[m - 1]);
    state.instances[m - 1] = copy;
    touched.emplace_back(m, copy);
    return *copy;
  };

  // buffer whatever arrived for instances this node already runs
  for (Port k = 1; k <= d; ++k) {
    const TaggedMessage& arriving = inbox[k];
    if (arriving.instance == 0) continue;
    if (arriving.instance > state.instances.size()) {
      throw ProtocolViolation("message for instance " + std::to_string(arriving.instance) +
                              " that does not exist yet, port " + std::to_string(k));
    }
    writable(arriving.instance).inbox[k - 1] = arriving.payload;
  }

  const std::size_t m = schedule_index(state.clock);
  ++state.clock;
  if (m > params_.m_max) {
    ++state.skipped;
  } else {
    if (m > state.instances.size()) {
      // the schedule reaches instances in order, so only m = size+1 can be new
      auto fresh = std::make_shared<InstanceSlot>();
      fresh->inbox.assign(d, AvgMessage{});
      state.instances.push_back(fresh);
      touched.emplace_back(m, fresh);
    }
    InstanceSlot& slot = writable(m);
    const AvgParams avg{static_cast<int>(m), params_.h_max};
    std::vector<AvgMessage> out(d);
    AvgNodeState stepped;
    if (!slot.state) {
      stepped = avg_start(current.x == params_.target ? static_cast<int>(m) : 0, avg, out);
    } else {
      std::vector<const AvgMessage*> slots(d);
      for (std::size_t k = 0; k < d; ++k) slots[k] = &slot.inbox[k];
      stepped = avg_transition(*slot.state, Inbox<AvgMessage>(slots), avg, out);
    }
    slot.stable = slot.state == stepped && slot.last_out == out;
    slot.state = std::move(stepped);
    for (Port k = 1; k <= d; ++k) next.out[k - 1] = TaggedMessage{m, out[k - 1]};
    slot.last_out = std::move(out);
  }

  next.y = readout(state);
  next.z = std::move(state);
}

bool FrequencyProtocol::settled(const Memory& memory) const {
  if (!memory || memory->instances.size() != params_.m_max) return false;
  for (const auto& slot : memory->instances) {
    if (!slot->stable) return false;
  }
  return true;
}

Bank<FrequencyProtocol> frequency_vector_bank(int alphabet_max, std::size_t m_max, int h_max) {
  Bank<FrequencyProtocol> bank;
  for (int v = 0; v <= alphabet_max; ++v) bank.add(FrequencyProtocol(FrequencyParams{v, m_max, h_max}));
  return bank;
}

std::optional<ProportionVector> proportion_readout(const Bank<FrequencyProtocol>::Output& outputs) {
  ProportionVector p;
  for (const auto& out : outputs) {
    if (!out) return std::nullopt;
    p.p.push_back(out->value());
  }
  return p;
}

}  // namespace anoncomp
