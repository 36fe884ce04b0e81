#include "minkray/report.hpp"

#include "minkray/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace minkray {

std::string Report::format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

void Report::set(const std::string& key, const std::string& value) {
    for (auto& e : entries_)
        if (e.first == key) {
            e.second = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format(value)); }
void Report::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Report::set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

bool Report::check_le(const std::string& key, double value, double tol) {
    bool ok = std::isfinite(value) && value <= tol;
    set(key + ".value", value);
    set(key + ".tol", tol);
    return check(key, ok);
}

bool Report::check_ge(const std::string& key, double value, double tol) {
    bool ok = std::isfinite(value) && value >= tol;
    set(key + ".value", value);
    set(key + ".min", tol);
    return check(key, ok);
}

bool Report::check(const std::string& key, bool ok) {
    set(key + ".pass", ok);
    if (!ok) ++failures_;
    return ok;
}

void Report::merge(const std::string& prefix, const Report& other) {
    for (const auto& [k, v] : other.entries_) set(prefix.empty() ? k : prefix + "." + k, v);
    failures_ += other.failures_;
}

const std::string* Report::find(const std::string& key) const {
    for (const auto& e : entries_)
        if (e.first == key) return &e.second;
    return nullptr;
}

std::string Report::str() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
    return os.str();
}

void Report::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write report: " + path);
    out << str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write csv: " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << Report::format(r[i]);
        out << "\n";
    }
}

}  // namespace minkray
