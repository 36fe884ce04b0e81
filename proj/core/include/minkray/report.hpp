#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace minkray {

// Ordered key/value document. Keys are dotted paths ("recon.f1.rel_error").
// Rendering is deterministic: insertion order, fixed numeric formatting.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
    void set(const std::string& key, std::size_t value) { set(key, static_cast<long long>(value)); }
    void set(const std::string& key, bool value);

    // value <= tol, recorded as key.value, key.tol, key.pass. Returns the flag.
    bool check_le(const std::string& key, double value, double tol);
    bool check_ge(const std::string& key, double value, double tol);
    bool check(const std::string& key, bool ok);

    // Nest another report under a prefix.
    void merge(const std::string& prefix, const Report& other);

    bool passed() const { return failures_ == 0; }
    int failures() const { return failures_; }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    const std::string* find(const std::string& key) const;

    std::string str() const;
    void write(const std::string& path) const;

    static std::string format(double v);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    int failures_ = 0;
};

// Row-oriented CSV helper.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace minkray
