// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "urllc/error.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace urllc {

/// Column formats: general floats use 12 significant digits, probabilities
/// are always written in scientific notation.
enum class ColumnKind { real, probability, integer, text };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::real;
};

using Cell = std::variant<double, std::int64_t, std::string>;

/// Rectangular table with `# key=value` metadata lines written before the
/// header row.
class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {}

    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

    void add_metadata(std::string key, std::string value) { metadata_.emplace_back(std::move(key), std::move(value)); }

    void add_row(std::vector<Cell> row)
    {
        if (row.size() != columns_.size()) {
            throw ContractError("ResultTable: row has " + std::to_string(row.size()) + " cells, expected " +
                                std::to_string(columns_.size()));
        }
        rows_.push_back(std::move(row));
    }

    std::size_t column_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (columns_[i].name == name) {
                return i;
            }
        }
        throw ContractError("ResultTable: no column named " + name);
    }

    /// Numeric value of a cell (integers widened, text rejected).
    double number(std::size_t row, const std::string& column) const
    {
        const auto& c = rows_.at(row).at(column_index(column));
        if (const auto* d = std::get_if<double>(&c)) {
            return *d;
        }
        if (const auto* i = std::get_if<std::int64_t>(&c)) {
            return static_cast<double>(*i);
        }
        throw ContractError("ResultTable: column " + column + " is text");
    }

    static std::string format(const Cell& cell, ColumnKind kind)
    {
        if (const auto* s = std::get_if<std::string>(&cell)) {
            return quote(*s);
        }
        if (const auto* i = std::get_if<std::int64_t>(&cell)) {
            return std::to_string(*i);
        }
        const double v = std::get<double>(cell);
        if (std::isnan(v)) {
            return "nan";
        }
        if (std::isinf(v)) {
            return v > 0 ? "inf" : "-inf";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, kind == ColumnKind::probability ? "%.11e" : "%.12g", v);
        return buf;
    }

    void write(std::ostream& out) const
    {
        for (const auto& [k, v] : metadata_) {
            out << "# " << k << '=' << v << '\n';
        }
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            out << (i ? "," : "") << quote(columns_[i].name);
        }
        out << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << format(row[i], columns_[i].kind);
            }
            out << '\n';
        }
    }

private:
    static std::string quote(const std::string& s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') {
                out += '"';
            }
            out += c;
        }
        return out + "\"";
    }

    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::pair<std::string, std::string>> metadata_;
};

} // namespace urllc
