#pragma once

#include <map>
#include <string>

namespace meshqos::detail {

// Scenario texts compiled in from the data/ directory; the definition is
// generated at build time. Keys are file stems, values canonical text.
const std::map<std::string, std::string>& builtin_scenarios();

}  // namespace meshqos::detail
