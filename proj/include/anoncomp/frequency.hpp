#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "anoncomp/averaging.hpp"
#include "anoncomp/compiler.hpp"
#include "anoncomp/engine.hpp"
#include "anoncomp/rational.hpp"

namespace anoncomp {

/// Instance run at round t under the triangular schedule 1; 1,2; 1,2,3; ...
std::size_t schedule_index(std::size_t t);

struct FrequencyParams {
  /// The value whose frequency is computed.
  int target = 1;
  /// Highest instance ever created; the harness sets it to n.
  std::size_t m_max = 1;
  int h_max = 1 << 16;
};

struct InstanceSlot {
  std::optional<AvgNodeState> state;
  /// Latest message received for this instance on each port.
  std::vector<AvgMessage> inbox;
  /// Messages this instance emitted on its most recent step.
  std::vector<AvgMessage> last_out;
  /// The most recent step changed neither the state nor the emitted messages.
  bool stable = false;

  bool operator==(const InstanceSlot&) const = default;
};

/// Slots are shared between consecutive configurations and copied only when
/// a round touches them; equality compares contents.
struct InterleavedState {
  std::size_t clock = 0;
  /// instances[m-1] is Q_m.
  std::vector<std::shared_ptr<const InstanceSlot>> instances;
  /// Rounds whose scheduled instance exceeded m_max.
  std::size_t skipped = 0;

  bool operator==(const InterleavedState& other) const;
};

/// One instance's message per port per round. instance == 0 is the empty message.
struct TaggedMessage {
  std::size_t instance = 0;
  AvgMessage payload;

  bool operator==(const TaggedMessage&) const = default;
};

struct FrequencyReadout {
  std::size_t m = 0;
  std::int64_t v = 0;

  Rational value() const { return Rational(v, static_cast<std::int64_t>(m)); }
  bool operator==(const FrequencyReadout&) const = default;
};

std::ostream& operator<<(std::ostream& os, const FrequencyReadout& r);
std::ostream& operator<<(std::ostream& os, const InterleavedState& s);
std::ostream& operator<<(std::ostream& os, const TaggedMessage& m);

/// v/m for the smallest instance m whose output is a singleton {v}.
std::optional<FrequencyReadout> readout(const InterleavedState& state);

class FrequencyProtocol {
 public:
  using Input = int;
  using Memory = std::optional<InterleavedState>;
  using Output = std::optional<FrequencyReadout>;
  using Message = TaggedMessage;

  explicit FrequencyProtocol(FrequencyParams params);
  const FrequencyParams& params() const { return params_; }

  void transition(const NodeState<FrequencyProtocol>& current, const Inbox<Message>& inbox,
                  NodeState<FrequencyProtocol>& next) const;

  /// Every instance up to m_max exists and its last step was a no-op.
  bool settled(const Memory& memory) const;

 private:
  FrequencyParams params_;
};

/// One frequency instance per value 0..K, run side by side.
Bank<FrequencyProtocol> frequency_vector_bank(int alphabet_max, std::size_t m_max, int h_max);

/// The full proportion vector once every component has a readout.
std::optional<ProportionVector> proportion_readout(const Bank<FrequencyProtocol>::Output& outputs);

}  // namespace anoncomp
