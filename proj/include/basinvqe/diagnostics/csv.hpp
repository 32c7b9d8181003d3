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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "../common.hpp"

namespace basinvqe::diagnostics {

/// Shortest text that reads back to the same double.
inline std::string format_real(real_t x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    for (int prec = 6; prec <= 17; ++prec) {
        std::ostringstream os;
        os << std::setprecision(prec) << x;
        if (std::stod(os.str()) == x) {
            return os.str();
        }
    }
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

/**
 * Table written as CSV with a leading "# key = value" comment block. The
 * comment block echoes configuration and seed; rows are the data body.
 */
class Table {
  public:
    Table() = default;
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void annotate(const std::string &key, const std::string &value) {
        notes_.emplace_back(key, value);
    }
    void annotate(const std::string &key, real_t value) { annotate(key, format_real(value)); }
    void annotate(const std::string &key, std::uint64_t value) {
        annotate(key, std::to_string(value));
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns_.size()) {
            throw ValidationError("table row has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(columns_.size()));
        }
        rows_.push_back(std::move(cells));
    }

    [[nodiscard]] const std::vector<std::string> &columns() const { return columns_; }
    [[nodiscard]] const std::vector<std::vector<std::string>> &rows() const { return rows_; }
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>> &notes() const {
        return notes_;
    }

    void write_csv(std::ostream &os) const {
        for (const auto &[k, v] : notes_) {
            os << "# " << k << " = " << v << '\n';
        }
        write_line(os, columns_);
        for (const auto &r : rows_) {
            write_line(os, r);
        }
    }

    [[nodiscard]] std::string csv() const {
        std::ostringstream os;
        write_csv(os);
        return os.str();
    }

    /// Space-padded columns for terminal output.
    void write_text(std::ostream &os) const {
        std::vector<std::size_t> w(columns_.size());
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            w[c] = columns_[c].size();
            for (const auto &r : rows_) {
                w[c] = std::max(w[c], r[c].size());
            }
        }
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                os << std::left << std::setw(static_cast<int>(w[c])) << cells[c];
                os << (c + 1 < cells.size() ? "  " : "\n");
            }
        };
        line(columns_);
        std::vector<std::string> rule;
        for (auto x : w) {
            rule.emplace_back(x, '-');
        }
        line(rule);
        for (const auto &r : rows_) {
            line(r);
        }
    }

  private:
    static void write_line(std::ostream &os, const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto &c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char ch : c) {
                    if (ch == '"') {
                        os << '"';
                    }
                    os << ch;
                }
                os << '"';
            } else {
                os << c;
            }
            os << (i + 1 < cells.size() ? ',' : '\n');
        }
    }

    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::vector<std::string>> rows_;
};

/// UTC timestamp as YYYYMMDDTHHMMSSZ.
inline std::string utc_timestamp(std::chrono::system_clock::time_point t =
                                     std::chrono::system_clock::now()) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return os.str();
}

/// <scan>_<timestamp>_<seed>.csv
inline std::string scan_filename(const std::string &scan, std::uint64_t seed,
                                 const std::string &timestamp = utc_timestamp()) {
    return scan + "_" + timestamp + "_" + std::to_string(seed) + ".csv";
}

} // namespace basinvqe::diagnostics
