#pragma once

// Module invariant batteries and the suite runner behind `sqfn verify`.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqfn/report.hpp"
#include "sqfn/scenarios.hpp"

namespace sqfn {

std::vector<CheckRecord> battery_grid(std::uint64_t seed);
std::vector<CheckRecord> battery_kernels(std::uint64_t seed);
std::vector<CheckRecord> battery_operators(std::uint64_t seed);
std::vector<CheckRecord> battery_weights(std::uint64_t seed);
std::vector<CheckRecord> battery_carleson(std::uint64_t seed);

// Module batteries followed by the scenarios, in execution order.
const std::vector<std::string>& suite_names();

// Runs the selected entries ("all" selects everything) in registry order,
// whatever the order or repetition in `selection`. An empty selection gives
// an empty record list. Throws ConfigError on an unknown name.
ExperimentReport run_suite(std::span<const std::string> selection, std::uint64_t seed = 7,
                           bool timing = false);

}  // namespace sqfn
