// Copyright 2026 The basinvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../common.hpp"
#include "../hamiltonian_io.hpp"

namespace basinvqe::cli {

/**
 * Flat structured text: `[section]` headers, `key = value` lines, `#` or `;`
 * comments. Keys before any header belong to section "run". Every lookup is
 * recorded with its resolved value (defaults included) for the manifest, and
 * check_consumed() rejects keys no command read.
 */
class RunConfig {
  public:
    RunConfig() = default;

    static RunConfig parse(const std::string &text, const std::string &origin = "<config>") {
        RunConfig c;
        std::istringstream in(text);
        std::string line;
        std::string section = "run";
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto where = origin + ":" + std::to_string(lineno);
            const auto cut = line.find_first_of("#;");
            if (cut != std::string::npos) {
                line.erase(cut);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']' || line.size() < 3) {
                    throw ConfigError(where + ": malformed section header");
                }
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(where + ": expected 'key = value'");
            }
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError(where + ": empty key");
            }
            if (!c.values_[section].emplace(key, value).second) {
                throw ConfigError(where + ": duplicate key '" + section + "." + key + "'");
            }
        }
        return c;
    }

    static RunConfig load(const std::string &path) { return parse(io::read_file(path), path); }

    /// Overrides or adds a value (command-line flags).
    void set(const std::string &section, const std::string &key, const std::string &value) {
        values_[section][key] = value;
    }

    [[nodiscard]] bool has(const std::string &section, const std::string &key) const {
        auto s = values_.find(section);
        return s != values_.end() && s->second.count(key) != 0;
    }

    [[nodiscard]] bool has_section(const std::string &section) const {
        return values_.count(section) != 0;
    }

    std::string get_string(const std::string &section, const std::string &key,
                           const std::optional<std::string> &fallback = std::nullopt) {
        return resolve(section, key, fallback, [](const std::string &s) { return s; });
    }

    std::string require_string(const std::string &section, const std::string &key) {
        return get_string(section, key);
    }

    real_t get_real(const std::string &section, const std::string &key,
                    std::optional<real_t> fallback = std::nullopt) {
        return resolve(section, key, fallback,
                       [&](const std::string &s) { return parse_real(s, section, key); });
    }

    std::uint64_t get_uint(const std::string &section, const std::string &key,
                           std::optional<std::uint64_t> fallback = std::nullopt) {
        return resolve(section, key, fallback,
                       [&](const std::string &s) { return parse_uint(s, section, key); });
    }

    bool get_bool(const std::string &section, const std::string &key,
                  std::optional<bool> fallback = std::nullopt) {
        return resolve(section, key, fallback, [&](const std::string &s) {
            if (s == "true" || s == "1" || s == "yes" || s == "on") {
                return true;
            }
            if (s == "false" || s == "0" || s == "no" || s == "off") {
                return false;
            }
            throw ConfigError(section + "." + key + ": expected a boolean, got '" + s + "'");
        });
    }

    /// Comma-separated list of reals.
    std::vector<real_t> get_reals(const std::string &section, const std::string &key,
                                  const std::optional<std::vector<real_t>> &fallback =
                                      std::nullopt) {
        return resolve(section, key, fallback, [&](const std::string &s) {
            std::vector<real_t> out;
            for (const auto &tok : split(s)) {
                out.push_back(parse_real(tok, section, key));
            }
            return out;
        });
    }

    std::vector<std::uint64_t> get_uints(const std::string &section, const std::string &key,
                                         const std::optional<std::vector<std::uint64_t>>
                                             &fallback = std::nullopt) {
        return resolve(section, key, fallback, [&](const std::string &s) {
            std::vector<std::uint64_t> out;
            for (const auto &tok : split(s)) {
                out.push_back(parse_uint(tok, section, key));
            }
            return out;
        });
    }

    std::vector<std::string> get_strings(const std::string &section, const std::string &key,
                                         const std::optional<std::vector<std::string>>
                                             &fallback = std::nullopt) {
        return resolve(section, key, fallback, [](const std::string &s) { return split(s); });
    }

    /// Throws ConfigError naming every key that no lookup consumed.
    void check_consumed() const {
        std::string unknown;
        for (const auto &[sec, kv] : values_) {
            for (const auto &[k, v] : kv) {
                if (!consumed_.count(sec + "." + k)) {
                    unknown += (unknown.empty() ? "" : ", ") + sec + "." + k;
                }
            }
        }
        if (!unknown.empty()) {
            throw ConfigError("unknown configuration keys: " + unknown);
        }
    }

    /// Every resolved "section.key" with its effective value.
    [[nodiscard]] const std::map<std::string, std::string> &effective() const { return effective_; }

  private:
    static std::string trim(const std::string &s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            return "";
        }
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static std::vector<std::string> split(const std::string &s) {
        std::vector<std::string> out;
        std::string tok;
        std::istringstream in(s);
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) {
                out.push_back(tok);
            }
        }
        return out;
    }

    static real_t parse_real(const std::string &s, const std::string &section,
                             const std::string &key) {
        real_t v = 0.0;
        const auto *end = s.data() + s.size();
        const auto r = std::from_chars(s.data(), end, v);
        if (r.ec != std::errc() || r.ptr != end) {
            throw ConfigError(section + "." + key + ": expected a number, got '" + s + "'");
        }
        return v;
    }

    static std::uint64_t parse_uint(const std::string &s, const std::string &section,
                                    const std::string &key) {
        std::uint64_t v = 0;
        const auto *end = s.data() + s.size();
        const auto r = std::from_chars(s.data(), end, v);
        if (r.ec != std::errc() || r.ptr != end) {
            throw ConfigError(section + "." + key + ": expected a non-negative integer, got '" +
                              s + "'");
        }
        return v;
    }

    template <class T> static std::string echo(const T &v) {
        if constexpr (std::is_same_v<T, std::string>) {
            return v;
        } else if constexpr (std::is_same_v<T, bool>) {
            return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, real_t>) {
            char buf[32];
            const auto r = std::to_chars(buf, buf + sizeof buf, v);
            return {buf, r.ptr};
        } else if constexpr (std::is_arithmetic_v<T>) {
            return std::to_string(v);
        } else {
            std::string s;
            for (const auto &x : v) {
                s += (s.empty() ? "" : ", ") + echo(x);
            }
            return s;
        }
    }

    template <class T, class Parse>
    T resolve(const std::string &section, const std::string &key, const std::optional<T> &fallback,
              Parse parse) {
        const auto full = section + "." + key;
        consumed_.insert(full);
        T v;
        if (has(section, key)) {
            v = parse(values_.at(section).at(key));
        } else if (fallback) {
            v = *fallback;
        } else {
            throw ConfigError("missing required key '" + full + "'");
        }
        effective_[full] = echo(v);
        return v;
    }

    std::map<std::string, std::map<std::string, std::string>> values_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> effective_;
};

} // namespace basinvqe::cli
