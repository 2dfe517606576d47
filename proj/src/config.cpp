#include "sieve/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sieve/error.hpp"

namespace sieve {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    for (char c : key) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
            return false;
    }
    return true;
}

}  // namespace

double parse_number(const std::string& raw, const std::string& context) {
    std::string text = trim(raw);
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "inf" || lower == "infinity" || lower == "+inf") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        fail(ErrorKind::ConfigError, context + ": not a number: '" + raw + "'");
    return value;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::ConfigError, origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            fail(ErrorKind::ConfigError, origin + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        cfg.entries_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string Config::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(ErrorKind::ConfigError, origin_ + ": missing key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    return parse_number(get_string(key), origin_ + ": key '" + key + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    double v = get_double(key);
    if (std::floor(v) != v || !std::isfinite(v))
        fail(ErrorKind::ConfigError, origin_ + ": key '" + key + "' must be an integer");
    return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(ErrorKind::ConfigError, origin_ + ": key '" + key + "' must be a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::string v = get_string(key);
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_number(item, origin_ + ": key '" + key + "'"));
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) fail(ErrorKind::ConfigError, "invalid key '" + key + "'");
    entries_[key] = value;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    std::string p = prefix + ".";
    for (auto it = entries_.lower_bound(p); it != entries_.end(); ++it) {
        if (it->first.compare(0, p.size(), p) != 0) break;
        out.push_back(it->first.substr(p.size()));
    }
    return out;
}

std::string Config::dump() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

}  // namespace sieve
