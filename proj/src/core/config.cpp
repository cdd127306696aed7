#include "core/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace bohmex {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (c.values_.count(full))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                              full + "'");
        c.values_[full] = {value, lineno};
    }
    return c;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::lookup(const std::string& key, bool required,
                           const std::string& def) {
    auto it = values_.find(key);
    std::string v;
    if (it == values_.end()) {
        if (required)
            throw ConfigError(origin_ + ": missing required key '" + key + "'");
        v = def;
    } else {
        v = it->second.first;
        consumed_.insert(key);
    }
    resolved_.emplace_back(key, v);
    return v;
}

std::string Config::get_string(const std::string& key, const std::string& def) {
    return lookup(key, false, def);
}

std::string Config::require_string(const std::string& key) {
    return lookup(key, true, "");
}

double Config::get_double(const std::string& key, double def) {
    if (!has(key)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", def);
        lookup(key, false, buf);
        return def;
    }
    const std::string v = lookup(key, false, "");
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing text");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + v + "'");
    }
}

long Config::get_long(const std::string& key, long def) {
    if (!has(key)) {
        lookup(key, false, std::to_string(def));
        return def;
    }
    const std::string v = lookup(key, false, "");
    try {
        size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing text");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
    }
}

bool Config::get_bool(const std::string& key, bool def) {
    if (!has(key)) {
        lookup(key, false, def ? "true" : "false");
        return def;
    }
    const std::string v = lookup(key, false, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& def) {
    if (!has(key)) {
        std::string joined;
        for (size_t i = 0; i < def.size(); ++i)
            joined += (i ? "," : "") + std::to_string(def[i]);
        lookup(key, false, joined);
        return def;
    }
    const std::string v = lookup(key, false, "");
    std::vector<double> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key '" + key + "' has a bad list entry '" +
                              item + "'");
        }
    }
    return out;
}

void Config::reject_unknown() const {
    std::string bad;
    for (const auto& [k, v] : values_) {
        if (!consumed_.count(k)) {
            if (!bad.empty()) bad += ", ";
            bad += "'" + k + "' (line " + std::to_string(v.second) + ")";
        }
    }
    if (!bad.empty()) throw ConfigError(origin_ + ": unknown keys: " + bad);
}

} // namespace bohmex
