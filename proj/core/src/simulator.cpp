#include "meshqos/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

#include "meshqos/errors.hpp"
#include "meshqos/events.hpp"
#include "meshqos/node.hpp"
#include "meshqos/radio.hpp"

namespace meshqos {

namespace {

enum class EvKind { kOrigination, kTxStart, kTxEnd, kTimeout };

struct Ev {
  EvKind kind = EvKind::kOrigination;
  std::uint64_t index = 0;  // origination/transmission index, or pending key
};

// One packet on one advertising channel.
struct Transmission {
  std::size_t sender = 0;  // node index
  int channel_slot = 0;    // 0..2 into kAdvChannels
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  int tx_power_dbm = 0;
  NetworkPdu pdu;
};

struct Pending {
  std::size_t record_index = 0;
  std::int64_t origin_us = 0;
  int initial_ttl = 0;
};

std::uint32_t pending_key(std::uint16_t src, std::uint16_t seq) {
  return (static_cast<std::uint32_t>(src) << 16) | seq;
}

bool overlaps(const Transmission& a, const Transmission& b) {
  return a.start_us < b.end_us && a.end_us > b.start_us;
}

struct Sim {
  const Scenario& scenario;
  const SimOptions& options;
  Rng rng;

  std::vector<NodeState> states;
  std::vector<std::vector<double>> rssi_at_0dbm;  // [sender][receiver]
  std::vector<TrafficOrigination> traffic;
  std::vector<PacketRecord> records;
  std::unordered_map<std::uint32_t, Pending> pending;

  std::vector<Transmission> transmissions;
  std::deque<std::size_t> live[3];  // per channel slot, sorted by start
  EventQueue<Ev> events;
  std::vector<double> interferers;  // scratch

  Sim(const Scenario& s, std::uint64_t seed, const SimOptions& opts)
      : scenario(s), options(opts), rng(derive_seed(seed, "sim")) {}

  std::int64_t jitter_max_us() const {
    return options.jitter_enabled ? kDefaultJitterMaxUs : 0;
  }

  void prepare() {
    states.reserve(scenario.nodes.size());
    for (const NodeConfig& node : scenario.nodes) {
      states.emplace_back(node);
    }
    const std::size_t n = scenario.nodes.size();
    rssi_at_0dbm.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        rssi_at_0dbm[i][j] =
            link_rssi(scenario.radio, scenario.nodes[i].position,
                      scenario.nodes[j].position, 0.0);
      }
    }
  }

  std::size_t node_index(const std::string& id) const {
    for (std::size_t i = 0; i < scenario.nodes.size(); ++i) {
      if (scenario.nodes[i].id == id) return i;
    }
    throw Error("unknown node '" + id + "'");
  }

  void prefill_records(std::uint64_t seed) {
    traffic = generate_traffic(scenario, seed);
    records.resize(traffic.size());
    for (std::size_t i = 0; i < traffic.size(); ++i) {
      const TrafficOrigination& o = traffic[i];
      const std::size_t src_node = node_index(o.source_id);
      const NodeConfig& node = scenario.nodes[src_node];
      if (o.element_index >= node.elements.size()) {
        throw Error("flow " + std::to_string(o.flow_index) + ": source " +
                    node.id + " lacks element " +
                    std::to_string(o.element_index));
      }
      const TxParams& params = scenario.policy.params_for_priority(
          static_cast<std::uint8_t>(o.priority));
      PacketRecord& r = records[i];
      r.timestamp_ms = o.time_us / 1000;
      r.test_id = o.flow_index;
      r.packet_id = o.packet_index;
      r.sender = node.elements[o.element_index];
      r.receiver = o.destination;
      r.ttl = params.ttl;
      r.tx_power_dbm = params.tx_power_dbm;
      r.priority = o.priority;
      r.delivered = false;
      r.number_of_hops = 0;
      events.push(o.time_us, Ev{EvKind::kOrigination, i});
    }
  }

  void push_broadcasts(std::size_t sender, const NetworkPdu& pdu,
                       const TxParams& params,
                       const std::vector<BroadcastEvent>& schedule) {
    for (const BroadcastEvent& be : schedule) {
      for (int slot = 0; slot < 3; ++slot) {
        Transmission tx;
        tx.sender = sender;
        tx.channel_slot = slot;
        tx.start_us = be.start_us + static_cast<std::int64_t>(slot) *
                                        scenario.radio.airtime_us;
        tx.end_us = tx.start_us + scenario.radio.airtime_us;
        tx.tx_power_dbm = params.tx_power_dbm;
        tx.pdu = pdu;
        const std::size_t index = transmissions.size();
        transmissions.push_back(std::move(tx));
        events.push(transmissions[index].start_us,
                    Ev{EvKind::kTxStart, index});
        events.push(transmissions[index].end_us, Ev{EvKind::kTxEnd, index});
      }
    }
  }

  void on_origination(std::size_t traffic_index, std::int64_t now_us) {
    const TrafficOrigination& o = traffic[traffic_index];
    const std::size_t src_node = node_index(o.source_id);
    OriginateResult result =
        originate(states[src_node], o.element_index, o.opcode, {},
                  o.destination, scenario.policy, now_us, rng,
                  jitter_max_us());
    const std::uint32_t key = pending_key(result.pdu.src, result.pdu.seq);
    pending[key] =
        Pending{traffic_index, now_us, static_cast<int>(result.pdu.ttl)};
    events.push(now_us + kDeliveryTimeoutUs + 1, Ev{EvKind::kTimeout, key});
    push_broadcasts(src_node, result.pdu, result.params, result.schedule);
  }

  void deliver(const NetworkPdu& pdu, std::int64_t now_us) {
    const auto it = pending.find(pending_key(pdu.src, pdu.seq));
    if (it == pending.end()) return;  // already delivered or timed out
    const Pending& p = it->second;
    PacketRecord& r = records[p.record_index];
    r.delivered = true;
    const std::int64_t delta_us = now_us - p.origin_us;
    r.pdt_ms = (delta_us + 500) / 1000;
    r.number_of_hops = hops_from_ttl(p.initial_ttl, pdu.ttl);
    pending.erase(it);
  }

  bool is_transmitting(std::size_t node, const Transmission& window) const {
    for (const auto& dq : live) {
      for (std::size_t idx : dq) {
        const Transmission& o = transmissions[idx];
        if (o.sender == node && overlaps(o, window)) return true;
      }
    }
    return false;
  }

  void on_tx_end(std::size_t tx_index, std::int64_t now_us) {
    const Transmission tx = transmissions[tx_index];
    std::deque<std::size_t>& dq = live[tx.channel_slot];

    // Entries ending at or before our start can never overlap anything
    // from here on (starts only move forward), so drop them.
    while (!dq.empty() && transmissions[dq.front()].end_us <= tx.start_us) {
      dq.pop_front();
    }

    for (std::size_t j = 0; j < states.size(); ++j) {
      if (j == tx.sender) continue;
      // A node that is itself on air cannot listen.
      if (is_transmitting(j, tx)) continue;

      const double rssi = rssi_at_0dbm[tx.sender][j] + tx.tx_power_dbm;
      interferers.clear();
      for (std::size_t idx : dq) {
        if (idx == tx_index) continue;
        const Transmission& o = transmissions[idx];
        if (o.sender == j || !overlaps(o, tx)) continue;
        interferers.push_back(rssi_at_0dbm[o.sender][j] + o.tx_power_dbm);
      }
      if (!reception_outcome(scenario.radio, rssi, interferers, rng)) {
        continue;
      }

      const RelayDecision decision =
          handle_received(states[j], tx.pdu, scenario.policy);
      switch (decision.action) {
        case RelayDecision::Action::kDeliver:
          deliver(tx.pdu, now_us);
          break;
        case RelayDecision::Action::kDeliverAndRelay:
          deliver(tx.pdu, now_us);
          [[fallthrough]];
        case RelayDecision::Action::kRelay: {
          const std::vector<BroadcastEvent> schedule = schedule_transmissions(
              *decision.relay_params, now_us, rng, jitter_max_us());
          push_broadcasts(j, *decision.relay_pdu, *decision.relay_params,
                          schedule);
          break;
        }
        case RelayDecision::Action::kDiscard:
          break;
      }
    }
  }

  std::vector<PacketRecord> run(std::uint64_t seed) {
    prepare();
    prefill_records(seed);
    while (!events.empty()) {
      const auto entry = events.pop();
      switch (entry.payload.kind) {
        case EvKind::kOrigination:
          on_origination(entry.payload.index, entry.time_us);
          break;
        case EvKind::kTxStart:
          live[transmissions[entry.payload.index].channel_slot].push_back(
              entry.payload.index);
          break;
        case EvKind::kTxEnd:
          on_tx_end(entry.payload.index, entry.time_us);
          break;
        case EvKind::kTimeout:
          pending.erase(static_cast<std::uint32_t>(entry.payload.index));
          break;
      }
    }
    std::sort(records.begin(), records.end(),
              [](const PacketRecord& a, const PacketRecord& b) {
                if (a.test_id != b.test_id) return a.test_id < b.test_id;
                return a.packet_id < b.packet_id;
              });
    return std::move(records);
  }
};

}  // namespace

std::vector<PacketRecord> run_simulation(const Scenario& scenario,
                                         std::uint64_t seed,
                                         const SimOptions& options) {
  const std::vector<std::string> problems = validate_scenario(scenario);
  if (!problems.empty()) {
    std::string message = "invalid scenario";
    for (const std::string& p : problems) message += "; " + p;
    throw Error(message);
  }
  Sim sim(scenario, seed, options);
  return sim.run(seed);
}

}  // namespace meshqos
