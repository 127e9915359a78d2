#pragma once

#include <iosfwd>
#include <string>

#include "hta/scenario.hpp"

namespace hta {

// Parse a scenario file. Sections: [radio], [type.NAME], [levels],
// [sweep-defaults]. Unit-suffixed keys (noise_dbm, period_ms, packet_bytes,
// energy_budget_uj, ...) are converted to SI here; everything downstream is
// SI only. Throws std::invalid_argument with file:line and field path.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(std::istream& in, const std::string& name);

}  // namespace hta
