#pragma once

#include "minkray/grid.hpp"
#include "minkray/lightray.hpp"
#include "minkray/wave.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace minkray::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "key = value" lines; '#' starts a comment. Unknown keys are rejected.
struct RunConfig {
    std::map<std::string, std::string> values;

    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    static bool known_key(const std::string& key);

    bool has(const std::string& key) const { return values.count(key) != 0; }
    void set(const std::string& key, const std::string& value);
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;
    long long integer(const std::string& key, long long fallback) const;
    bool flag(const std::string& key, bool fallback) const;

    // Grid keys checked against the grid invariants.
    GridSpec grid() const;
    RayChart chart(const GridSpec& g) const;
    WaveCoefficients wave(int n) const;
    std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed", 1)); }
};

}  // namespace minkray::cli
