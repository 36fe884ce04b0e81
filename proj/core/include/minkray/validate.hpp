#pragma once

#include "minkray/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace minkray {

struct ValidateConfig {
    std::uint64_t seed = 1;
    int trials = 20;     // random pairs per dimension in the adjoint suite
    bool quick = false;  // shrunken grids for smoke runs; tolerances unchanged
};

// Suites: adjoint, slice, normal, symbols, wave, ellipticity, transport, crossterm, cauchy, source, stability.
// "all" runs every suite. Reports never contain timings, so equal inputs give equal text.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);
Report run_suite(const std::string& name, const ValidateConfig& cfg);

Report suite_adjoint(const ValidateConfig& cfg);
Report suite_slice(const ValidateConfig& cfg);
Report suite_normal(const ValidateConfig& cfg);
Report suite_symbols(const ValidateConfig& cfg);
Report suite_wave(const ValidateConfig& cfg);
Report suite_ellipticity(const ValidateConfig& cfg);
Report suite_transport(const ValidateConfig& cfg);
Report suite_crossterm(const ValidateConfig& cfg);
Report suite_cauchy(const ValidateConfig& cfg);
Report suite_source(const ValidateConfig& cfg);
Report suite_stability(const ValidateConfig& cfg);

}  // namespace minkray
