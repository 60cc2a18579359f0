#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "meshqos/pdu.hpp"
#include "meshqos/qos.hpp"
#include "meshqos/radio.hpp"
#include "meshqos/rng.hpp"

namespace meshqos {

// Default random delay added to each broadcast event, and the cache depth
// used to recognize packets a node has already handled.
inline constexpr std::int64_t kDefaultJitterMaxUs = 10'000;
inline constexpr std::size_t kMessageCacheCapacity = 128;

// Remembers recently seen (src, seq) pairs with least-recently-used
// eviction. One shared check-and-insert keeps duplicate suppression and
// relay suppression consistent: whoever asks first wins.
class MessageCache {
 public:
  explicit MessageCache(std::size_t capacity = kMessageCacheCapacity)
      : capacity_(capacity) {}

  // True when the pair was already cached. Inserts it (or refreshes its
  // recency) either way, evicting the stalest entry at capacity.
  bool check_insert(std::uint16_t src, std::uint16_t seq);

  std::size_t size() const { return order_.size(); }

 private:
  std::size_t capacity_;
  std::list<std::uint32_t> order_;  // most recent at front
  std::unordered_map<std::uint32_t, std::list<std::uint32_t>::iterator> index_;
};

struct NodeConfig {
  std::string id;
  Position position;
  std::vector<std::uint16_t> elements;  // unicast address per element
  std::set<std::uint16_t> subscriptions;
  bool relay_enabled = true;

  bool operator==(const NodeConfig&) const = default;
};

// Mutable per-node protocol state.
struct NodeState {
  explicit NodeState(NodeConfig cfg)
      : config(std::move(cfg)), seq_counters(config.elements.size(), 0) {}

  NodeConfig config;
  std::vector<std::uint16_t> seq_counters;  // next seq per element
  MessageCache cache;
};

// One broadcast event; the radio sends on channels 37, 38 and 39
// back-to-back starting at this time.
struct BroadcastEvent {
  std::int64_t start_us = 0;
};

enum class DiscardReason {
  kDuplicate,
  kTtlExpired,
  kRelayDisabled,
};

// Outcome of handling one received pdu.
struct RelayDecision {
  enum class Action { kDeliver, kDeliverAndRelay, kRelay, kDiscard };

  Action action = Action::kDiscard;
  std::uint16_t deliver_to = 0;            // receiving element when delivering
  std::optional<NetworkPdu> relay_pdu;     // ttl-decremented copy
  std::optional<TxParams> relay_params;    // derived from the pdu's priority
  DiscardReason reason = DiscardReason::kDuplicate;
};

struct OriginateResult {
  NetworkPdu pdu;
  TxParams params;
  std::vector<BroadcastEvent> schedule;
};

// Broadcast schedule for a pdu: 1 + n_rep events, event k at
// now + k * adv_interval + jitter_k with jitter_k uniform in
// [0, jitter_max_us]. Pass jitter_max_us = 0 for a fully deterministic
// schedule.
std::vector<BroadcastEvent> schedule_transmissions(
    const TxParams& params, std::int64_t now_us, Rng& rng,
    std::int64_t jitter_max_us = kDefaultJitterMaxUs);

// Builds and schedules a new packet from one of the node's elements. The
// opcode picks the priority class via the policy; the class's parameters
// set the initial ttl and the broadcast schedule. Advances the element's
// sequence counter (mod 2^16). Throws Error on a bad element index and
// CodecError on an oversized payload or invalid destination.
OriginateResult originate(NodeState& state, std::size_t element_index,
                          std::uint32_t opcode,
                          const std::vector<std::uint8_t>& payload,
                          std::uint16_t dst, const QosPolicy& policy,
                          std::int64_t now_us, Rng& rng,
                          std::int64_t jitter_max_us = kDefaultJitterMaxUs);

// The relay procedure applied to every received pdu, in order:
//   1. duplicates (cached (src, seq)) are discarded before anything else;
//   2. a pdu addressed to one of this node's elements is delivered;
//   3. a pdu for a subscribed group address is delivered, and also
//      relayed when relaying is enabled and ttl >= 2;
//   4. anything else is relayed under the same conditions, or discarded.
// A relayed copy differs from the original only in its decremented ttl;
// its transmission parameters come from the pdu's own priority class so
// every hop honors the class the source chose.
RelayDecision handle_received(NodeState& state, const NetworkPdu& pdu,
                              const QosPolicy& policy);

}  // namespace meshqos
