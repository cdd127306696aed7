#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace bohmex {

// Flat key = value configuration with [section] headers and '#' comments.
// Keys are addressed as "section.key"; keys before any header live in the
// "" section. Unknown keys are rejected when the consumer finishes.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def);
    std::string require_string(const std::string& key);
    double get_double(const std::string& key, double def);
    long get_long(const std::string& key, long def);
    bool get_bool(const std::string& key, bool def);
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& def);

    // throws ConfigError naming every key that was never consumed
    void reject_unknown() const;

    // full resolved view (consumed keys with their values) for manifests
    const std::vector<std::pair<std::string, std::string>>& resolved() const {
        return resolved_;
    }
    const std::string& origin() const { return origin_; }

  private:
    std::string lookup(const std::string& key, bool required, const std::string& def);
    std::string origin_;
    std::map<std::string, std::pair<std::string, int>> values_; // key -> (value, line)
    std::set<std::string> consumed_;
    std::vector<std::pair<std::string, std::string>> resolved_;
};

} // namespace bohmex
