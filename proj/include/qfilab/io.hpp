// Copyright 2026 The qfi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qfilab/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace qfilab {

/// Shortest-safe round-trip text for a double: 17 significant digits in
/// scientific notation ("1.4399999999999999e+00").
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

/// Parses text written by format_double (and plain decimal numbers).
inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::InvalidArgument, "not a number: " + std::string(s));
    }
    return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

using Cell = std::variant<double, std::int64_t, std::string>;

/// A flat result table with one unit string per column.
struct Table {
    std::string name;  // file stem, e.g. "sensitivity"
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw Error(ErrorCode::InvalidArgument, "row width does not match header");
        rows.push_back(std::move(row));
    }
};

enum class OutputFormat { Csv, Json };

inline std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

/// CSV with '#' comment lines for units and the config hash, then the
/// header row, then one line per row.
inline std::string to_csv(const Table& t, std::string_view config_hash) {
    std::string out;
    out += "# table: " + t.name + "\n";
    out += "# config_hash: " + std::string(config_hash) + "\n";
    out += "# units:";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? ", " : " ") + t.columns[i] + " [" + (i < t.units.size() ? t.units[i] : "") + "]";
    }
    out += "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
        out += "\n";
    }
    return out;
}

inline std::string to_json(const Table& t, std::string_view config_hash) {
    nlohmann::ordered_json j;
    j["table"] = t.name;
    j["config_hash"] = config_hash;
    j["columns"] = t.columns;
    j["units"] = t.units;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            if (const auto* d = std::get_if<double>(&c)) {
                // JSON has no inf/nan literals; those become strings.
                if (std::isfinite(*d)) r.push_back(*d);
                else r.push_back(format_double(*d));
            } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
                r.push_back(*i);
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

/// Writes through a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorCode::InvalidArgument, "cannot move output into " + path.string() + ": " + ec.message());
    }
}

/// Writes `t` as <dir>/<name>.csv or .json and returns the path.
inline std::filesystem::path write_table(const std::filesystem::path& dir, const Table& t, OutputFormat format,
                                         std::string_view config_hash) {
    const bool csv = format == OutputFormat::Csv;
    const auto path = dir / (t.name + (csv ? ".csv" : ".json"));
    write_atomic(path, csv ? to_csv(t, config_hash) : to_json(t, config_hash));
    return path;
}

}  // namespace qfilab
