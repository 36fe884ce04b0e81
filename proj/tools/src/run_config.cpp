#include "run_config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace minkray::cli {

namespace {

const std::array<const char*, 33> kKeys = {
    "n",        "Nx",       "Nt",       "Lx",       "T",        "t1",       "R0",    "Ntheta", "Npolar",
    "scheme",   "waveA0",   "waveA1",   "waveA2",   "waveA3",   "waveB",    "waveBim", "mode", "m_min",
    "delta",    "eps_reg",  "band_limit", "Ttilde", "pipeline", "input",    "truth", "seed", "suite",
    "sigma",    "kappa",    "data",     "trials",   "quick",    "pad"};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

bool RunConfig::known_key(const std::string& key) {
    return std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) { return key == k; }) != kKeys.end();
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    values[key] = value;
}

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineNo) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineNo) + ": empty key or value");
        if (c.values.count(key)) throw ConfigError("line " + std::to_string(lineNo) + ": duplicate key '" + key + "'");
        try {
            c.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
}

double RunConfig::num(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: " + it->second);
    }
}

long long RunConfig::integer(const std::string& key, long long fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    try {
        std::size_t pos = 0;
        long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: " + it->second);
    }
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    if (it->second == "1" || it->second == "true" || it->second == "yes") return true;
    if (it->second == "0" || it->second == "false" || it->second == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

GridSpec RunConfig::grid() const {
    GridSpec g;
    g.n = static_cast<int>(integer("n", 2));
    g.Nx = static_cast<int>(integer("Nx", 64));
    g.Nt = static_cast<int>(integer("Nt", 64));
    g.Lx = num("Lx", 4.0);
    g.T = num("T", 2.0);
    g.t1 = num("t1", 0.5);
    g.R0 = num("R0", 1.0);
    try {
        g.validate();
    } catch (const ContractError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    return g;
}

RayChart RunConfig::chart(const GridSpec& g) const {
    std::string scheme = str("scheme", g.n == 2 ? "uniform" : "gl");
    if (scheme == "uniform") {
        if (g.n != 2) throw ConfigError("scheme 'uniform' is for n = 2");
        int k = static_cast<int>(integer("Ntheta", 64));
        if (k < 1) throw ConfigError("Ntheta must be positive");
        return make_chart_uniform(g, k);
    }
    if (scheme == "gl") {
        if (g.n != 3) throw ConfigError("scheme 'gl' is for n = 3");
        int p = static_cast<int>(integer("Npolar", 8));
        int a = static_cast<int>(integer("Ntheta", 2 * p));
        if (p < 1 || a < 1) throw ConfigError("Npolar and Ntheta must be positive");
        return make_chart_gl(g, p, a);
    }
    throw ConfigError("unknown scheme '" + scheme + "'");
}

WaveCoefficients RunConfig::wave(int n) const {
    WaveCoefficients c;
    for (int j = 0; j <= n; ++j) c.A.push_back(num("waveA" + std::to_string(j), 0.0));
    if (n < 3 && has("waveA3")) throw ConfigError("waveA3 needs n = 3");
    c.B = cplx(num("waveB", 0.0), num("waveBim", 0.0));
    return c;
}

}  // namespace minkray::cli
