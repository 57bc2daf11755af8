#pragma once

// Line-oriented key-value configuration (a TOML-compatible subset):
// [section] headers, key = value pairs, # comments, numbers, booleans,
// quoted strings, and (nested) arrays. Keys are flattened to
// "section.key". Unknown keys are rejected by the consumers via the
// consumed-key bookkeeping here.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ues {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigValue {
    enum class Type { Number, Boolean, String, Array };
    Type type = Type::Number;
    double num = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<ConfigValue> arr;

    [[nodiscard]] double as_number(const std::string& key) const {
        if (type != Type::Number) throw ConfigError("key '" + key + "' must be a number");
        return num;
    }
    [[nodiscard]] bool as_bool(const std::string& key) const {
        if (type != Type::Boolean) throw ConfigError("key '" + key + "' must be a boolean");
        return boolean;
    }
    [[nodiscard]] const std::string& as_string(const std::string& key) const {
        if (type != Type::String) throw ConfigError("key '" + key + "' must be a string");
        return str;
    }
    [[nodiscard]] std::vector<double> as_numbers(const std::string& key) const {
        if (type == Type::Number) return {num};
        if (type != Type::Array) throw ConfigError("key '" + key + "' must be an array");
        std::vector<double> out;
        out.reserve(arr.size());
        for (const auto& v : arr) out.push_back(v.as_number(key));
        return out;
    }
    [[nodiscard]] std::vector<std::vector<double>> as_number_rows(const std::string& key) const {
        if (type != Type::Array) throw ConfigError("key '" + key + "' must be an array");
        std::vector<std::vector<double>> out;
        for (const auto& row : arr) out.push_back(row.as_numbers(key));
        return out;
    }
};

namespace detail {

inline std::string strip(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline ConfigValue parse_value(const std::string& raw, int line_no) {
    const std::string s = strip(raw);
    if (s.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value");
    ConfigValue v;
    if (s.front() == '[') {
        if (s.back() != ']') {
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
        }
        v.type = ConfigValue::Type::Array;
        const std::string body = s.substr(1, s.size() - 2);
        int depth = 0;
        bool in_str = false;
        char quote = 0;
        std::string item;
        auto flush = [&]() {
            const std::string it = strip(item);
            if (!it.empty()) v.arr.push_back(parse_value(it, line_no));
            item.clear();
        };
        for (char c : body) {
            if (in_str) {
                item += c;
                if (c == quote) in_str = false;
                continue;
            }
            if (c == '"' || c == '\'') {
                in_str = true;
                quote = c;
                item += c;
            } else if (c == '[') {
                ++depth;
                item += c;
            } else if (c == ']') {
                --depth;
                item += c;
            } else if (c == ',' && depth == 0) {
                flush();
            } else {
                item += c;
            }
        }
        flush();
        return v;
    }
    if (s.front() == '"' || s.front() == '\'') {
        if (s.size() < 2 || s.back() != s.front()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
        }
        v.type = ConfigValue::Type::String;
        v.str = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.type = ConfigValue::Type::Boolean;
        v.boolean = (s == "true");
        return v;
    }
    try {
        std::size_t pos = 0;
        v.num = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        v.type = ConfigValue::Type::Number;
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + s +
                          "'");
    }
}

inline std::string strip_comment(const std::string& line) {
    bool in_str = false;
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_str) {
            if (c == quote) in_str = false;
        } else if (c == '"' || c == '\'') {
            in_str = true;
            quote = c;
        } else if (c == '#') {
            return line.substr(0, i);
        }
    }
    return line;
}

}  // namespace detail

/// Parsed configuration with section-qualified keys and consumed-key
/// tracking, so scenario construction can reject unknown keys and log every
/// default it applied.
class ConfigFile {
public:
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "") {
        ConfigFile cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            line = detail::strip(detail::strip_comment(line));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ConfigError(origin + " line " + std::to_string(line_no) +
                                      ": malformed section header");
                }
                section = detail::strip(line.substr(1, line.size() - 2));
                if (section.empty()) {
                    throw ConfigError(origin + " line " + std::to_string(line_no) +
                                      ": empty section name");
                }
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(origin + " line " + std::to_string(line_no) +
                                  ": expected key = value");
            }
            const std::string key = detail::strip(line.substr(0, eq));
            if (key.empty()) {
                throw ConfigError(origin + " line " + std::to_string(line_no) +
                                  ": empty key");
            }
            const std::string full = section.empty() ? key : section + "." + key;
            if (cfg.values_.count(full)) {
                throw ConfigError(origin + " line " + std::to_string(line_no) +
                                  ": duplicate key '" + full + "'");
            }
            cfg.values_.emplace(full, detail::parse_value(line.substr(eq + 1), line_no));
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path);
    }

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }

    /// Marks the key consumed and returns its value, if present.
    [[nodiscard]] const ConfigValue* find(const std::string& key) const {
        consumed_.insert(key);
        const auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    double number_or(const std::string& key, double def) const {
        const ConfigValue* v = find(key);
        if (!v) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", def);
            log_default(key, buf);
            return def;
        }
        return v->as_number(key);
    }

    std::string string_or(const std::string& key, const std::string& def) const {
        const ConfigValue* v = find(key);
        if (!v) {
            log_default(key, "\"" + def + "\"");
            return def;
        }
        return v->as_string(key);
    }

    bool bool_or(const std::string& key, bool def) const {
        const ConfigValue* v = find(key);
        if (!v) {
            log_default(key, def ? "true" : "false");
            return def;
        }
        return v->as_bool(key);
    }

    /// Overrides (or inserts) a numeric key; used by CLI flags and sweeps.
    void set_number(const std::string& key, double value) {
        ConfigValue v;
        v.type = ConfigValue::Type::Number;
        v.num = value;
        values_[key] = v;
    }

    /// Keys present in the file that no consumer asked about.
    [[nodiscard]] std::vector<std::string> unconsumed() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_) {
            if (!consumed_.count(k)) out.push_back(k);
        }
        return out;
    }

    [[nodiscard]] const std::vector<std::string>& defaults_applied() const {
        return defaults_log_;
    }
    [[nodiscard]] const std::string& origin() const { return origin_; }

private:
    void log_default(const std::string& key, const std::string& rendered) const {
        defaults_log_.push_back(key + " = " + rendered + " (default)");
    }

    std::string origin_;
    std::map<std::string, ConfigValue> values_;
    mutable std::set<std::string> consumed_;
    mutable std::vector<std::string> defaults_log_;
};

}  // namespace ues
