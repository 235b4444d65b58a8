#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "needlet/errors.hpp"

namespace needlet::tools {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": '" + value + "' is not a number");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": '" + value + "' is not an integer");
    }
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    Config cfg;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError(path + ":" + std::to_string(line_no) +
                                  ": empty section name");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": key outside any [section]");
        cfg.kv_[section + "." + key] = value;
    }
    return cfg;
}

const std::string& Config::require(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config key " + key + " is required");
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::require_double(const std::string& key) const {
    return parse_double(key, require(key));
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
}

long Config::require_long(const std::string& key) const {
    return parse_long(key, require(key));
}

long Config::get_long(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_long(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + ": '" + v + "' is not a boolean");
}

std::vector<int> Config::require_int_list(const std::string& key) const {
    const std::string& raw = require(key);
    std::vector<int> out;
    const std::size_t dots = raw.find("..");
    if (dots != std::string::npos) {
        const long lo = parse_long(key, trim(raw.substr(0, dots)));
        const long hi = parse_long(key, trim(raw.substr(dots + 2)));
        if (hi < lo) throw ConfigError("config key " + key + ": empty range");
        if (hi - lo > 10'000) throw ConfigError("config key " + key + ": range too long");
        for (long v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v));
        return out;
    }
    for (const std::string& item : split(raw, ','))
        out.push_back(static_cast<int>(parse_long(key, item)));
    return out;
}

std::vector<double> Config::require_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(require(key), ','))
        out.push_back(parse_double(key, item));
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            std::vector<double> fallback) const {
    return has(key) ? require_double_list(key) : std::move(fallback);
}

std::vector<std::vector<double>> Config::require_matrix(const std::string& key) const {
    std::vector<std::vector<double>> out;
    for (const std::string& row : split(require(key), ';')) {
        std::vector<double> r;
        for (const std::string& item : split(row, ',')) r.push_back(parse_double(key, item));
        out.push_back(std::move(r));
    }
    return out;
}

std::uint64_t Config::digest() const {
    std::uint64_t h = 14695981039346656037ULL;
    const auto eat = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [key, value] : kv_) {  // std::map iterates sorted
        if (key == "run.out") continue;  // digest identifies the computation, not where it lands
        eat(key);
        eat("=");
        eat(value);
        eat("\n");
    }
    return h;
}

std::string Config::digest_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(digest()));
    return buf;
}

}  // namespace needlet::tools
