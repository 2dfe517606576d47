#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sieve {

// Plain-text configuration: one `section.key = value` per line, '#' starts a
// comment, blank lines are ignored. Keys are case sensitive. Later assignments
// of the same key override earlier ones.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return entries_; }
    // Keys under `prefix.` with the prefix stripped.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    std::string dump() const;

private:
    std::map<std::string, std::string> entries_;
    std::string origin_;
};

// Parses "inf"/"infinity" as +infinity; otherwise a strict floating literal.
double parse_number(const std::string& text, const std::string& context);

}  // namespace sieve
