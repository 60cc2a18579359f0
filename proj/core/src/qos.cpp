#include "meshqos/qos.hpp"

#include <algorithm>

namespace meshqos {

std::uint8_t QosPolicy::priority_for_opcode(std::uint32_t opcode) const {
  auto it = opcode_to_priority_.find(opcode);
  return it != opcode_to_priority_.end() ? it->second : default_priority_;
}

const TxParams& QosPolicy::params_for_priority(std::uint8_t priority) const {
  auto it = priority_params_.find(priority);
  if (it != priority_params_.end()) return it->second;
  static const TxParams fallback{};
  auto def = priority_params_.find(default_priority_);
  return def != priority_params_.end() ? def->second : fallback;
}

std::optional<std::uint32_t> QosPolicy::opcode_for_priority(
    std::uint8_t priority) const {
  for (const auto& [opcode, cls] : opcode_to_priority_) {
    if (cls == priority) return opcode;  // map iteration is ordered
  }
  return std::nullopt;
}

QosPolicy builtin_policy() {
  // One sensor-style opcode per class so traffic generators can originate
  // packets of any class.
  std::map<std::uint32_t, std::uint8_t> opcodes{
      {0x51, 1},
      {0x52, 2},
      {0x53, 3},
  };
  std::map<std::uint8_t, TxParams> params{
      {1, TxParams{2, 20, 7, 4}},
      {2, TxParams{2, 100, 5, -8}},
      {3, TxParams{2, 200, 3, -20}},
  };
  return QosPolicy(std::move(opcodes), std::move(params), 2);
}

namespace {

void check_params(std::uint8_t priority, const TxParams& p,
                  std::vector<PolicyViolation>& out) {
  const std::string where = "priority " + std::to_string(priority);
  if (p.n_rep < kNRepMin || p.n_rep > kNRepMax) {
    out.push_back({where + " n_rep",
                   std::to_string(p.n_rep) + " outside 0..1000"});
  }
  if (p.adv_interval_ms < kAdvIntervalMinMs ||
      p.adv_interval_ms > kAdvIntervalMaxMs) {
    out.push_back({where + " adv_interval_ms",
                   std::to_string(p.adv_interval_ms) + " outside 20..10240"});
  }
  if (p.ttl < 0 || p.ttl > 127) {
    out.push_back({where + " ttl", std::to_string(p.ttl) + " outside 0..127"});
  }
  if (std::find(std::begin(kTxPowerLevelsDbm), std::end(kTxPowerLevelsDbm),
                p.tx_power_dbm) == std::end(kTxPowerLevelsDbm)) {
    out.push_back({where + " tx_power_dbm",
                   std::to_string(p.tx_power_dbm) +
                       " is not one of 4, 0, -8, -20, -40"});
  }
}

}  // namespace

std::vector<PolicyViolation> validate_policy(const QosPolicy& policy) {
  std::vector<PolicyViolation> out;
  for (const auto& [priority, params] : policy.params_map()) {
    if (priority == 0) {
      out.push_back({"priority 0",
                     "class 0 marks unprioritized packets and cannot carry "
                     "parameters"});
    }
    check_params(priority, params, out);
  }
  for (const auto& [opcode, priority] : policy.opcode_map()) {
    if (!policy.params_map().contains(priority)) {
      out.push_back({"opcode " + std::to_string(opcode),
                     "references priority " + std::to_string(priority) +
                         " which has no parameters"});
    }
  }
  if (policy.default_priority() == 0 ||
      !policy.params_map().contains(policy.default_priority())) {
    out.push_back({"default_priority",
                   "class " + std::to_string(policy.default_priority()) +
                       " has no parameters"});
  }
  return out;
}

}  // namespace meshqos
