#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sudas/harness.hpp"

namespace sudas {

// "section.key" -> raw value, in file order.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// INI text with sections system, power, rates, circuit, amplifier, channel,
// solver, experiment. Throws ConfigError on syntax errors.
ConfigEntries parse_config_text(const std::string& text);
// Throws IoError when unreadable.
ConfigEntries load_config_file(const std::string& path);

std::optional<std::string> find_entry(const ConfigEntries& entries, const std::string& key);

// Overlays the entries on `spec`. Per-UE keys take a comma list of n_ues
// values or one value for all UEs. Powers are in W, or in dBm under the
// `_dbm`-suffixed key. experiment.preset is not applied here (see
// find_entry). Throws ConfigError naming the key path.
void apply_config(const ConfigEntries& entries, ExperimentSpec& spec);

}  // namespace sudas
