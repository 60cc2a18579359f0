#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshqos/node.hpp"
#include "meshqos/qos.hpp"
#include "meshqos/radio.hpp"
#include "meshqos/rng.hpp"

namespace meshqos {

// One periodic traffic source. Each packet's priority class is drawn from
// priority_weights; the element used to send is the rank of the drawn
// class among the weighted classes, so distinct classes originate from
// distinct elements of the source node.
struct TrafficFlow {
  std::string source_id;
  std::uint16_t destination = 0;  // group or unicast element address
  int packets = 0;
  std::int64_t interval_ms = 0;
  std::map<int, double> priority_weights;

  bool operator==(const TrafficFlow&) const = default;
};

struct Scenario {
  std::string name;
  RadioModel radio;
  QosPolicy policy;
  std::vector<NodeConfig> nodes;
  std::vector<TrafficFlow> flows;

  bool operator==(const Scenario&) const = default;
};

// Parses the INI-style scenario text. Syntax errors and malformed values
// throw ScenarioError carrying the offending line number. The result is
// not semantically checked; run validate_scenario for that.
Scenario load_scenario(const std::string& text);

// Canonical text form. Sections and keys are emitted in a fixed order
// with fixed spelling, so serialize_scenario(load_scenario(t)) == t for
// any text already in canonical form, and the output of this function is
// always canonical.
std::string serialize_scenario(const Scenario& scenario);

// Every problem that would make the scenario unrunnable, in a stable
// order. Empty means the scenario is valid.
std::vector<std::string> validate_scenario(const Scenario& scenario);

// Names of the scenarios compiled into the library.
std::vector<std::string> builtin_scenario_names();

// Canonical text of a built-in scenario. Throws Error for unknown names.
const std::string& builtin_scenario_text(const std::string& name);

// Parsed built-ins: a 15-node grid with three traffic classes. The second
// experiment is identical except for an additional cross-flow.
Scenario experiment1();
Scenario experiment2();

// One packet origination produced by traffic generation.
struct TrafficOrigination {
  int flow_index = 0;  // 1-based; becomes the dataset's test id
  std::int64_t packet_index = 0;
  std::int64_t time_us = 0;
  std::string source_id;
  std::size_t element_index = 0;
  std::uint32_t opcode = 0;
  std::uint16_t destination = 0;
  int priority = 0;

  bool operator==(const TrafficOrigination&) const = default;
};

// Expands every flow into concrete originations. Packet k of a flow is
// stamped exactly k * interval_ms after time zero; priorities are drawn
// from a per-flow random stream derived from the seed, so adding or
// removing one flow never changes another flow's draws. The result is
// sorted by time, then flow index.
std::vector<TrafficOrigination> generate_traffic(const Scenario& scenario,
                                                 std::uint64_t seed);

}  // namespace meshqos
