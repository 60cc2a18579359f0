#include "meshqos/node.hpp"

#include <algorithm>

namespace meshqos {

bool MessageCache::check_insert(std::uint16_t src, std::uint16_t seq) {
  const std::uint32_t key = (static_cast<std::uint32_t>(src) << 16) | seq;
  auto it = index_.find(key);
  if (it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return true;
  }
  order_.push_front(key);
  index_[key] = order_.begin();
  if (order_.size() > capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
  return false;
}

std::vector<BroadcastEvent> schedule_transmissions(const TxParams& params,
                                                   std::int64_t now_us,
                                                   Rng& rng,
                                                   std::int64_t jitter_max_us) {
  std::vector<BroadcastEvent> events;
  events.reserve(static_cast<std::size_t>(params.n_rep) + 1);
  const std::int64_t interval_us = std::int64_t{params.adv_interval_ms} * 1000;
  for (int k = 0; k <= params.n_rep; ++k) {
    const std::int64_t jitter =
        jitter_max_us > 0 ? rng.uniform_int(0, jitter_max_us) : 0;
    events.push_back({now_us + k * interval_us + jitter});
  }
  return events;
}

OriginateResult originate(NodeState& state, std::size_t element_index,
                          std::uint32_t opcode,
                          const std::vector<std::uint8_t>& payload,
                          std::uint16_t dst, const QosPolicy& policy,
                          std::int64_t now_us, Rng& rng,
                          std::int64_t jitter_max_us) {
  if (element_index >= state.config.elements.size()) {
    throw Error("node " + state.config.id + " has no element " +
                std::to_string(element_index));
  }
  const std::uint8_t priority = policy.priority_for_opcode(opcode);
  const TxParams& params = policy.params_for_priority(priority);

  NetworkPdu pdu;
  pdu.src = state.config.elements[element_index];
  pdu.dst = dst;
  pdu.ttl = static_cast<std::uint8_t>(params.ttl);
  pdu.seq = state.seq_counters[element_index];
  pdu.priority = priority;
  pdu.payload = payload;
  validate_pdu(pdu);

  // 16-bit counter wraps naturally.
  ++state.seq_counters[element_index];

  // The origin caches its own packet so copies echoed back by relays are
  // recognized as duplicates.
  state.cache.check_insert(pdu.src, pdu.seq);

  return OriginateResult{pdu, params,
                         schedule_transmissions(params, now_us, rng,
                                                jitter_max_us)};
}

RelayDecision handle_received(NodeState& state, const NetworkPdu& pdu,
                              const QosPolicy& policy) {
  RelayDecision decision;
  if (state.cache.check_insert(pdu.src, pdu.seq)) {
    decision.action = RelayDecision::Action::kDiscard;
    decision.reason = DiscardReason::kDuplicate;
    return decision;
  }

  const auto& elements = state.config.elements;
  if (std::find(elements.begin(), elements.end(), pdu.dst) != elements.end()) {
    decision.action = RelayDecision::Action::kDeliver;
    decision.deliver_to = pdu.dst;
    return decision;
  }

  const bool can_relay = state.config.relay_enabled && pdu.ttl >= 2;
  const bool subscribed = is_group_address(pdu.dst) &&
                          state.config.subscriptions.contains(pdu.dst);

  if (can_relay) {
    decision.relay_pdu = pdu;
    decision.relay_pdu->ttl = static_cast<std::uint8_t>(pdu.ttl - 1);
    decision.relay_params = policy.params_for_priority(pdu.priority);
  }

  if (subscribed) {
    decision.deliver_to = elements.empty() ? 0 : elements.front();
    decision.action = can_relay ? RelayDecision::Action::kDeliverAndRelay
                                : RelayDecision::Action::kDeliver;
    return decision;
  }

  if (can_relay) {
    decision.action = RelayDecision::Action::kRelay;
    return decision;
  }

  decision.action = RelayDecision::Action::kDiscard;
  decision.reason = state.config.relay_enabled ? DiscardReason::kTtlExpired
                                               : DiscardReason::kRelayDisabled;
  return decision;
}

}  // namespace meshqos
