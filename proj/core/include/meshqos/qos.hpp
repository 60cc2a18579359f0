#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meshqos {

// Transmission parameters attached to one priority class.
struct TxParams {
  int n_rep = 0;             // retransmissions after the first broadcast
  int adv_interval_ms = 20;  // spacing between broadcast events
  int ttl = 0;               // initial ttl given to originated packets
  int tx_power_dbm = 0;      // radio power for every broadcast

  bool operator==(const TxParams&) const = default;
};

// Valid ranges for TxParams fields. tx_power is limited to the discrete
// levels the target radios expose.
inline constexpr int kNRepMin = 0;
inline constexpr int kNRepMax = 1000;
inline constexpr int kAdvIntervalMinMs = 20;
inline constexpr int kAdvIntervalMaxMs = 10240;
inline constexpr int kTxPowerLevelsDbm[] = {4, 0, -8, -20, -40};

struct PolicyViolation {
  std::string where;    // e.g. "priority 2 adv_interval_ms"
  std::string message;  // human-readable reason

  bool operator==(const PolicyViolation&) const = default;
};

// Maps application opcodes to priority classes and priority classes to
// transmission parameters. Construction is permissive; validate_policy
// reports range violations and dangling references.
class QosPolicy {
 public:
  QosPolicy() = default;
  QosPolicy(std::map<std::uint32_t, std::uint8_t> opcode_to_priority,
            std::map<std::uint8_t, TxParams> priority_params,
            std::uint8_t default_priority)
      : opcode_to_priority_(std::move(opcode_to_priority)),
        priority_params_(std::move(priority_params)),
        default_priority_(default_priority) {}

  // Priority class for an opcode; unregistered opcodes get the default
  // priority, so every packet leaves the source with a class assigned.
  std::uint8_t priority_for_opcode(std::uint32_t opcode) const;

  // Parameters for a priority class. Classes without an entry (including
  // priority 0, "no explicit priority") use the default class's entry.
  const TxParams& params_for_priority(std::uint8_t priority) const;

  // Lowest opcode registered for the class, if any. Used by traffic
  // generation to pick a concrete opcode for a drawn priority.
  std::optional<std::uint32_t> opcode_for_priority(std::uint8_t priority) const;

  const std::map<std::uint32_t, std::uint8_t>& opcode_map() const {
    return opcode_to_priority_;
  }
  const std::map<std::uint8_t, TxParams>& params_map() const {
    return priority_params_;
  }
  std::uint8_t default_priority() const { return default_priority_; }

  bool operator==(const QosPolicy&) const = default;

 private:
  std::map<std::uint32_t, std::uint8_t> opcode_to_priority_;
  std::map<std::uint8_t, TxParams> priority_params_;
  std::uint8_t default_priority_ = 0;
};

// The built-in three-class policy: class 1 is the most urgent (highest
// power, shortest interval, largest ttl), class 3 the most relaxed, and
// unprioritized traffic defaults to class 2.
QosPolicy builtin_policy();

// Empty result means the policy is usable: every TxParams field in range,
// every referenced priority has parameters, default priority valid.
std::vector<PolicyViolation> validate_policy(const QosPolicy& policy);

}  // namespace meshqos
