#include "meshqos/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_set>

#include "meshqos/errors.hpp"
#include "meshqos/pdu.hpp"
#include "builtin_scenarios.hpp"

namespace meshqos {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(trim(s.substr(start)));
      return parts;
    }
    parts.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ScenarioError(line, message);
}

double parse_double(std::string_view v, int line, const std::string& key) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    fail(line, "'" + std::string(v) + "' is not a number for " + key);
  }
  return out;
}

std::int64_t parse_int(std::string_view v, int line, const std::string& key) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail(line, "'" + std::string(v) + "' is not an integer for " + key);
  }
  return out;
}

std::uint32_t parse_u32(std::string_view v, int line, const std::string& key) {
  std::uint32_t out = 0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    begin += 2;
    base = 16;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out, base);
  if (ec != std::errc{} || ptr != end) {
    fail(line, "'" + std::string(v) + "' is not an unsigned number for " + key);
  }
  return out;
}

std::uint16_t parse_address(std::string_view v, int line,
                            const std::string& key) {
  const std::uint32_t raw = parse_u32(v, line, key);
  if (raw > 0xFFFF) {
    fail(line, "'" + std::string(v) + "' does not fit a 16-bit address for " +
                   key);
  }
  return static_cast<std::uint16_t>(raw);
}

bool parse_bool(std::string_view v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(line, "'" + std::string(v) + "' is not true/false for " + key);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_address(std::uint16_t a) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", a);
  return buf;
}

std::string format_opcode(std::uint32_t op) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%02X", op);
  return buf;
}

enum class SectionKind {
  kNone,
  kScenario,
  kRadio,
  kPolicy,
  kPriority,
  kNode,
  kFlow,
};

struct ParserState {
  Scenario scenario;
  std::map<std::uint32_t, std::uint8_t> opcodes;
  std::map<std::uint8_t, TxParams> priority_params;
  int default_priority = 0;

  SectionKind section = SectionKind::kNone;
  int section_line = 0;
  int section_priority = 0;   // for kPriority
  std::size_t section_node = 0;  // index into scenario.nodes for kNode
  std::size_t section_flow = 0;  // index into scenario.flows for kFlow
  std::set<std::string> seen_keys;

  bool seen_scenario = false;
  bool seen_radio = false;
  bool seen_policy = false;
  std::set<std::string> node_ids;
};

void require_key(const ParserState& st, const char* key) {
  if (!st.seen_keys.count(key)) {
    fail(st.section_line,
         std::string("section is missing required key '") + key + "'");
  }
}

void close_section(ParserState& st) {
  switch (st.section) {
    case SectionKind::kScenario:
      require_key(st, "name");
      break;
    case SectionKind::kNode:
      require_key(st, "position");
      require_key(st, "elements");
      break;
    case SectionKind::kFlow:
      require_key(st, "source");
      require_key(st, "destination");
      require_key(st, "packets");
      require_key(st, "interval_ms");
      require_key(st, "priority_weights");
      break;
    default:
      break;
  }
  st.seen_keys.clear();
}

void open_section(ParserState& st, std::string_view inner, int line) {
  close_section(st);
  st.section_line = line;

  const std::size_t space = inner.find(' ');
  const std::string_view head =
      space == std::string_view::npos ? inner : trim(inner.substr(0, space));
  const std::string_view rest =
      space == std::string_view::npos ? std::string_view{}
                                      : trim(inner.substr(space + 1));

  if (head == "scenario") {
    if (!rest.empty()) fail(line, "[scenario] takes no argument");
    if (st.seen_scenario) fail(line, "duplicate [scenario] section");
    st.seen_scenario = true;
    st.section = SectionKind::kScenario;
  } else if (head == "radio") {
    if (!rest.empty()) fail(line, "[radio] takes no argument");
    if (st.seen_radio) fail(line, "duplicate [radio] section");
    st.seen_radio = true;
    st.section = SectionKind::kRadio;
  } else if (head == "policy") {
    if (!rest.empty()) fail(line, "[policy] takes no argument");
    if (st.seen_policy) fail(line, "duplicate [policy] section");
    st.seen_policy = true;
    st.section = SectionKind::kPolicy;
  } else if (head == "priority") {
    if (rest.empty()) fail(line, "[priority] needs a class number");
    const std::int64_t n = parse_int(rest, line, "priority class");
    if (n < 0 || n > 255) fail(line, "priority class must be 0..255");
    if (st.priority_params.count(static_cast<std::uint8_t>(n))) {
      fail(line, "duplicate [priority " + std::to_string(n) + "] section");
    }
    st.priority_params[static_cast<std::uint8_t>(n)] = TxParams{};
    st.section = SectionKind::kPriority;
    st.section_priority = static_cast<int>(n);
  } else if (head == "node") {
    if (rest.empty()) fail(line, "[node] needs an identifier");
    if (rest.find(' ') != std::string_view::npos ||
        rest.find('\t') != std::string_view::npos) {
      fail(line, "node identifier cannot contain whitespace");
    }
    if (!st.node_ids.insert(std::string(rest)).second) {
      fail(line, "duplicate [node " + std::string(rest) + "] section");
    }
    NodeConfig node;
    node.id = std::string(rest);
    st.scenario.nodes.push_back(std::move(node));
    st.section = SectionKind::kNode;
    st.section_node = st.scenario.nodes.size() - 1;
  } else if (head == "flow") {
    if (rest.empty()) fail(line, "[flow] needs a number");
    const std::int64_t n = parse_int(rest, line, "flow number");
    const std::int64_t expected =
        static_cast<std::int64_t>(st.scenario.flows.size()) + 1;
    if (n != expected) {
      fail(line, "flow sections must be numbered sequentially from 1; "
                 "expected [flow " +
                     std::to_string(expected) + "]");
    }
    st.scenario.flows.emplace_back();
    st.section = SectionKind::kFlow;
    st.section_flow = st.scenario.flows.size() - 1;
  } else {
    fail(line, "unknown section [" + std::string(inner) + "]");
  }
}

void handle_key(ParserState& st, std::string_view key, std::string_view value,
                int line) {
  if (st.section == SectionKind::kNone) {
    fail(line, "key '" + std::string(key) + "' appears outside any section");
  }
  if (!st.seen_keys.insert(std::string(key)).second) {
    fail(line, "duplicate key '" + std::string(key) + "'");
  }
  const std::string k(key);

  switch (st.section) {
    case SectionKind::kScenario: {
      if (k == "name") {
        st.scenario.name = std::string(value);
      } else {
        fail(line, "unknown key '" + k + "' in [scenario]");
      }
      break;
    }
    case SectionKind::kRadio: {
      RadioModel& r = st.scenario.radio;
      if (k == "path_loss_ref_db") {
        r.path_loss_ref_db = parse_double(value, line, k);
      } else if (k == "path_loss_exp") {
        r.path_loss_exp = parse_double(value, line, k);
      } else if (k == "sensitivity_dbm") {
        r.sensitivity_dbm = parse_double(value, line, k);
      } else if (k == "capture_margin_db") {
        r.capture_margin_db = parse_double(value, line, k);
      } else if (k == "scan_duty") {
        r.scan_duty = parse_double(value, line, k);
      } else if (k == "airtime_us") {
        const std::int64_t v = parse_int(value, line, k);
        if (v < 1 || v > 1'000'000) fail(line, "airtime_us must be 1..1000000");
        r.airtime_us = static_cast<int>(v);
      } else {
        fail(line, "unknown key '" + k + "' in [radio]");
      }
      break;
    }
    case SectionKind::kPolicy: {
      if (k == "default_priority") {
        const std::int64_t v = parse_int(value, line, k);
        if (v < 0 || v > 255) fail(line, "default_priority must be 0..255");
        st.default_priority = static_cast<int>(v);
      } else if (k.rfind("opcode.", 0) == 0) {
        const std::uint32_t op =
            parse_u32(std::string_view(k).substr(7), line, "opcode");
        const std::int64_t pr = parse_int(value, line, k);
        if (pr < 0 || pr > 255) fail(line, "priority class must be 0..255");
        st.opcodes[op] = static_cast<std::uint8_t>(pr);
      } else {
        fail(line, "unknown key '" + k + "' in [policy]");
      }
      break;
    }
    case SectionKind::kPriority: {
      TxParams& p = st.priority_params.at(
          static_cast<std::uint8_t>(st.section_priority));
      const std::int64_t v = parse_int(value, line, k);
      if (k == "n_rep") {
        p.n_rep = static_cast<int>(v);
      } else if (k == "adv_interval_ms") {
        p.adv_interval_ms = static_cast<int>(v);
      } else if (k == "ttl") {
        p.ttl = static_cast<int>(v);
      } else if (k == "tx_power_dbm") {
        p.tx_power_dbm = static_cast<int>(v);
      } else {
        fail(line, "unknown key '" + k + "' in [priority]");
      }
      break;
    }
    case SectionKind::kNode: {
      NodeConfig& node = st.scenario.nodes[st.section_node];
      if (k == "position") {
        const auto parts = split(value, ',');
        if (parts.size() != 2) {
          fail(line, "position needs exactly two coordinates");
        }
        node.position.x = parse_double(parts[0], line, "position");
        node.position.y = parse_double(parts[1], line, "position");
      } else if (k == "elements") {
        for (std::string_view part : split(value, ',')) {
          node.elements.push_back(parse_address(part, line, "elements"));
        }
      } else if (k == "relay") {
        node.relay_enabled = parse_bool(value, line, k);
      } else if (k == "subscribe") {
        for (std::string_view part : split(value, ',')) {
          node.subscriptions.insert(parse_address(part, line, "subscribe"));
        }
      } else {
        fail(line, "unknown key '" + k + "' in [node]");
      }
      break;
    }
    case SectionKind::kFlow: {
      TrafficFlow& flow = st.scenario.flows[st.section_flow];
      if (k == "source") {
        flow.source_id = std::string(value);
      } else if (k == "destination") {
        flow.destination = parse_address(value, line, k);
      } else if (k == "packets") {
        const std::int64_t v = parse_int(value, line, k);
        if (v < 0 || v > 100'000'000) {
          fail(line, "packets must be 0..100000000");
        }
        flow.packets = static_cast<int>(v);
      } else if (k == "interval_ms") {
        flow.interval_ms = parse_int(value, line, k);
      } else if (k == "priority_weights") {
        for (std::string_view part : split(value, ',')) {
          const std::size_t colon = part.find(':');
          if (colon == std::string_view::npos) {
            fail(line, "priority_weights entries look like 'class:weight'");
          }
          const std::int64_t pr =
              parse_int(trim(part.substr(0, colon)), line, k);
          if (pr < 0 || pr > 255) fail(line, "priority class must be 0..255");
          const double w = parse_double(trim(part.substr(colon + 1)), line, k);
          if (!flow.priority_weights.emplace(static_cast<int>(pr), w).second) {
            fail(line, "priority class " + std::to_string(pr) +
                           " is weighted twice");
          }
        }
      } else {
        fail(line, "unknown key '" + k + "' in [flow]");
      }
      break;
    }
    case SectionKind::kNone:
      break;
  }
}

}  // namespace

Scenario load_scenario(const std::string& text) {
  ParserState st;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      open_section(st, trim(line.substr(1, line.size() - 2)), line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(line_no, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    handle_key(st, key, value, line_no);
  }
  close_section(st);
  if (!st.seen_scenario) {
    fail(0, "missing [scenario] section");
  }
  st.scenario.policy =
      QosPolicy(std::move(st.opcodes), std::move(st.priority_params),
                static_cast<std::uint8_t>(st.default_priority));
  return st.scenario;
}

std::string serialize_scenario(const Scenario& scenario) {
  std::vector<std::string> sections;

  sections.push_back("[scenario]\nname = " + scenario.name + "\n");

  {
    const RadioModel& r = scenario.radio;
    std::string s = "[radio]\n";
    s += "path_loss_ref_db = " + format_double(r.path_loss_ref_db) + "\n";
    s += "path_loss_exp = " + format_double(r.path_loss_exp) + "\n";
    s += "sensitivity_dbm = " + format_double(r.sensitivity_dbm) + "\n";
    s += "capture_margin_db = " + format_double(r.capture_margin_db) + "\n";
    s += "scan_duty = " + format_double(r.scan_duty) + "\n";
    s += "airtime_us = " + std::to_string(r.airtime_us) + "\n";
    sections.push_back(std::move(s));
  }

  {
    std::string s = "[policy]\n";
    s += "default_priority = " +
         std::to_string(static_cast<int>(scenario.policy.default_priority())) +
         "\n";
    for (const auto& [opcode, priority] : scenario.policy.opcode_map()) {
      s += "opcode." + format_opcode(opcode) + " = " +
           std::to_string(static_cast<int>(priority)) + "\n";
    }
    sections.push_back(std::move(s));
  }

  for (const auto& [priority, params] : scenario.policy.params_map()) {
    std::string s =
        "[priority " + std::to_string(static_cast<int>(priority)) + "]\n";
    s += "n_rep = " + std::to_string(params.n_rep) + "\n";
    s += "adv_interval_ms = " + std::to_string(params.adv_interval_ms) + "\n";
    s += "ttl = " + std::to_string(params.ttl) + "\n";
    s += "tx_power_dbm = " + std::to_string(params.tx_power_dbm) + "\n";
    sections.push_back(std::move(s));
  }

  for (const NodeConfig& node : scenario.nodes) {
    std::string s = "[node " + node.id + "]\n";
    s += "position = " + format_double(node.position.x) + ", " +
         format_double(node.position.y) + "\n";
    s += "elements = ";
    for (std::size_t i = 0; i < node.elements.size(); ++i) {
      if (i > 0) s += ", ";
      s += format_address(node.elements[i]);
    }
    s += "\n";
    s += std::string("relay = ") + (node.relay_enabled ? "true" : "false") +
         "\n";
    if (!node.subscriptions.empty()) {
      s += "subscribe = ";
      bool first = true;
      for (std::uint16_t address : node.subscriptions) {
        if (!first) s += ", ";
        s += format_address(address);
        first = false;
      }
      s += "\n";
    }
    sections.push_back(std::move(s));
  }

  for (std::size_t i = 0; i < scenario.flows.size(); ++i) {
    const TrafficFlow& flow = scenario.flows[i];
    std::string s = "[flow " + std::to_string(i + 1) + "]\n";
    s += "source = " + flow.source_id + "\n";
    s += "destination = " + format_address(flow.destination) + "\n";
    s += "packets = " + std::to_string(flow.packets) + "\n";
    s += "interval_ms = " + std::to_string(flow.interval_ms) + "\n";
    s += "priority_weights = ";
    bool first = true;
    for (const auto& [priority, weight] : flow.priority_weights) {
      if (!first) s += ", ";
      s += std::to_string(priority) + ":" + format_double(weight);
      first = false;
    }
    s += "\n";
    sections.push_back(std::move(s));
  }

  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i > 0) out += "\n";
    out += sections[i];
  }
  return out;
}

std::vector<std::string> validate_scenario(const Scenario& scenario) {
  std::vector<std::string> problems;
  auto add = [&problems](std::string message) {
    problems.push_back(std::move(message));
  };

  if (scenario.name.empty()) add("scenario name is empty");

  const RadioModel& r = scenario.radio;
  if (!(r.path_loss_exp > 0.0)) add("radio: path_loss_exp must be positive");
  if (!(r.scan_duty > 0.0 && r.scan_duty <= 1.0)) {
    add("radio: scan_duty must be in (0, 1]");
  }
  if (r.capture_margin_db < 0.0) {
    add("radio: capture_margin_db cannot be negative");
  }
  if (r.airtime_us < 1) add("radio: airtime_us must be at least 1");

  for (const PolicyViolation& v : validate_policy(scenario.policy)) {
    add("policy: " + v.where + ": " + v.message);
  }

  if (scenario.nodes.size() < 2) add("at least two nodes are required");

  std::set<std::string> ids;
  std::set<std::uint16_t> all_elements;
  std::map<std::pair<double, double>, std::string> positions;
  for (const NodeConfig& node : scenario.nodes) {
    const std::string where = "node " + node.id;
    if (node.id.empty()) add("node with empty identifier");
    if (!ids.insert(node.id).second) add(where + ": duplicate identifier");
    if (node.elements.empty()) add(where + ": needs at least one element");
    for (std::uint16_t e : node.elements) {
      if (!is_unicast_address(e)) {
        add(where + ": element " + format_address(e) +
            " is not a unicast address");
      } else if (!all_elements.insert(e).second) {
        add(where + ": element " + format_address(e) +
            " is already assigned");
      }
    }
    for (std::uint16_t g : node.subscriptions) {
      if (!is_group_address(g)) {
        add(where + ": subscription " + format_address(g) +
            " is not a group address");
      }
    }
    const auto key = std::make_pair(node.position.x, node.position.y);
    const auto [it, inserted] = positions.emplace(key, node.id);
    if (!inserted) {
      add(where + ": position coincides with node " + it->second);
    }
  }

  for (std::size_t i = 0; i < scenario.flows.size(); ++i) {
    const TrafficFlow& flow = scenario.flows[i];
    const std::string where = "flow " + std::to_string(i + 1);

    const NodeConfig* source = nullptr;
    for (const NodeConfig& node : scenario.nodes) {
      if (node.id == flow.source_id) {
        source = &node;
        break;
      }
    }
    if (source == nullptr) {
      add(where + ": unknown source node '" + flow.source_id + "'");
    }

    if (is_group_address(flow.destination)) {
      bool subscribed = false;
      for (const NodeConfig& node : scenario.nodes) {
        if (node.subscriptions.count(flow.destination)) {
          subscribed = true;
          break;
        }
      }
      if (!subscribed) {
        add(where + ": no node subscribes to group " +
            format_address(flow.destination));
      }
    } else if (is_unicast_address(flow.destination)) {
      if (!all_elements.count(flow.destination)) {
        add(where + ": no node owns element " +
            format_address(flow.destination));
      }
    } else {
      add(where + ": destination " + format_address(flow.destination) +
          " is neither unicast nor group");
    }

    if (flow.packets < 1) add(where + ": packets must be at least 1");
    if (flow.interval_ms < 1) add(where + ": interval_ms must be at least 1");

    if (flow.priority_weights.empty()) {
      add(where + ": priority_weights is empty");
    }
    for (const auto& [priority, weight] : flow.priority_weights) {
      if (!(weight > 0.0)) {
        add(where + ": weight for priority " + std::to_string(priority) +
            " must be positive");
      }
      if (!scenario.policy
               .opcode_for_priority(static_cast<std::uint8_t>(priority))
               .has_value()) {
        add(where + ": priority " + std::to_string(priority) +
            " has no opcode registered in the policy");
      }
    }
    if (source != nullptr &&
        source->elements.size() < flow.priority_weights.size()) {
      add(where + ": source " + source->id + " has " +
          std::to_string(source->elements.size()) +
          " elements but " + std::to_string(flow.priority_weights.size()) +
          " weighted priorities");
    }
  }

  return problems;
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::builtin_scenarios()) {
    names.push_back(name);
  }
  return names;
}

const std::string& builtin_scenario_text(const std::string& name) {
  const auto& all = detail::builtin_scenarios();
  const auto it = all.find(name);
  if (it == all.end()) {
    throw Error("unknown built-in scenario '" + name + "'");
  }
  return it->second;
}

Scenario experiment1() { return load_scenario(builtin_scenario_text("experiment1")); }

Scenario experiment2() { return load_scenario(builtin_scenario_text("experiment2")); }

std::vector<TrafficOrigination> generate_traffic(const Scenario& scenario,
                                                 std::uint64_t seed) {
  std::vector<TrafficOrigination> out;
  for (std::size_t f = 0; f < scenario.flows.size(); ++f) {
    const TrafficFlow& flow = scenario.flows[f];
    const int flow_index = static_cast<int>(f) + 1;
    Rng rng(derive_seed(seed, "traffic/" + std::to_string(flow_index)));

    std::vector<int> classes;
    std::vector<double> weights;
    classes.reserve(flow.priority_weights.size());
    for (const auto& [priority, weight] : flow.priority_weights) {
      classes.push_back(priority);
      weights.push_back(weight);
    }
    if (classes.empty()) {
      throw Error("flow " + std::to_string(flow_index) +
                  " has no priority weights");
    }

    for (int k = 0; k < flow.packets; ++k) {
      const std::size_t idx = rng.weighted_index(weights);
      TrafficOrigination o;
      o.flow_index = flow_index;
      o.packet_index = k;
      o.time_us = static_cast<std::int64_t>(k) * flow.interval_ms * 1000;
      o.source_id = flow.source_id;
      o.element_index = idx;
      o.priority = classes[idx];
      o.destination = flow.destination;
      const auto opcode = scenario.policy.opcode_for_priority(
          static_cast<std::uint8_t>(o.priority));
      if (!opcode) {
        throw Error("flow " + std::to_string(flow_index) +
                    ": no opcode registered for priority " +
                    std::to_string(o.priority));
      }
      o.opcode = *opcode;
      out.push_back(std::move(o));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const TrafficOrigination& a, const TrafficOrigination& b) {
              if (a.time_us != b.time_us) return a.time_us < b.time_us;
              if (a.flow_index != b.flow_index) {
                return a.flow_index < b.flow_index;
              }
              return a.packet_index < b.packet_index;
            });
  return out;
}

}  // namespace meshqos
