#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace needlet::tools {

// Declarative experiment description: "[section]" headers and "key = value"
// lines, full-line '#' comments. Keys are addressed as "section.key".
// Command-line flags overwrite entries before the digest is taken, so the
// digest identifies the effective configuration.
class Config {
  public:
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    const std::string& require(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;

    double require_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long require_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // "4,5,6" or a range "4..9"
    std::vector<int> require_int_list(const std::string& key) const;
    std::vector<double> require_double_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const;

    // Rows separated by ';', entries by ','.
    std::vector<std::vector<double>> require_matrix(const std::string& key) const;

    // FNV-1a over the sorted canonical "key=value" pairs.
    std::uint64_t digest() const;
    std::string digest_hex() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace needlet::tools
