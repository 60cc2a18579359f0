#pragma once

#include <cstdint>
#include <vector>

#include "meshqos/metrics.hpp"
#include "meshqos/scenario.hpp"

namespace meshqos {

// Deliveries later than this after origination no longer count; the
// packet is recorded as lost.
inline constexpr std::int64_t kDeliveryTimeoutUs = 5'000'000;

struct SimOptions {
  // When false every transmission is scheduled without the random
  // per-event jitter, which makes small hand-checkable setups exact.
  bool jitter_enabled = true;

  bool operator==(const SimOptions&) const = default;
};

// Runs the full discrete-event simulation of a scenario: traffic
// expansion, per-channel broadcasts, interference, relaying and delivery
// accounting. Returns one record per originated packet, sorted by
// (test id, packet id). The same scenario, seed and options always
// produce the same records. Throws Error when the scenario is invalid.
std::vector<PacketRecord> run_simulation(const Scenario& scenario,
                                         std::uint64_t seed,
                                         const SimOptions& options = {});

}  // namespace meshqos
