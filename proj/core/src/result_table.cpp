// SPDX-License-Identifier: Apache-2.0
//
// cfmimo: downlink link-level simulator for cell-free massive MIMO with multi-antenna users
// Copyright (C) 2026 The cfmimo Authors
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

#include "cfmimo/result_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "cfmimo/types.hpp"

namespace cfmimo {

namespace {

const std::vector<std::string>& header_columns() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> out;
        std::stringstream ss(kResultHeader);
        std::string c;
        while (std::getline(ss, c, ',')) {
            out.push_back(c);
        }
        return out;
    }();
    return all;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_cell(const std::string& s, const std::string& column, std::size_t line_no) {
    std::istringstream in(s);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) {
        throw DataError("results CSV line " + std::to_string(line_no) + ": bad value '" + s + "' in column " +
                        column);
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void ResultTable::write_csv(std::ostream& out) const {
    out << kResultHeader << '\n';
    for (const auto& r : rows) {
        out << r.preset << ',' << r.method << ',' << r.bound << ',' << r.param_name << ','
            << format_number(r.param_value) << ',' << r.drop << ',' << r.user << ',' << format_number(r.se_bits_per_hz)
            << ',' << r.seed << ',' << r.n_blocks << '\n';
    }
}

std::string ResultTable::to_csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

ResultTable ResultTable::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("results CSV is empty (missing header)");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto& expected = header_columns();
    const auto got = split(line);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= got.size()) {
            throw DataError("results CSV header is missing column '" + expected[i] + "'");
        }
        if (got[i] != expected[i]) {
            throw DataError("results CSV header mismatch: expected column '" + expected[i] + "', found '" + got[i] +
                            "'");
        }
    }
    if (got.size() > expected.size()) {
        throw DataError("results CSV header has unexpected column '" + got[expected.size()] + "'");
    }

    ResultTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto c = split(line);
        if (c.size() != expected.size()) {
            throw DataError("results CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(expected.size()) + " fields, found " + std::to_string(c.size()));
        }
        ResultRow r;
        r.preset = c[0];
        r.method = c[1];
        r.bound = c[2];
        r.param_name = c[3];
        r.param_value = parse_cell<double>(c[4], expected[4], line_no);
        r.drop = parse_cell<int>(c[5], expected[5], line_no);
        r.user = parse_cell<int>(c[6], expected[6], line_no);
        r.se_bits_per_hz = parse_cell<double>(c[7], expected[7], line_no);
        r.seed = parse_cell<std::uint64_t>(c[8], expected[8], line_no);
        r.n_blocks = parse_cell<int>(c[9], expected[9], line_no);
        table.rows.push_back(std::move(r));
    }
    return table;
}

std::vector<SummaryRow> summarize(const ResultTable& table) {
    using Key = std::tuple<std::string, std::string, std::string, std::string, double>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> values;
    std::map<Key, std::map<int, double>> per_drop_sum;
    for (const auto& r : table.rows) {
        Key key{r.preset, r.method, r.bound, r.param_name, r.param_value};
        auto [it, inserted] = values.try_emplace(key);
        if (inserted) {
            order.push_back(key);
        }
        it->second.push_back(r.se_bits_per_hz);
        per_drop_sum[key][r.drop] += r.se_bits_per_hz;
    }

    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        auto v = values[key];
        SummaryRow s;
        std::tie(s.preset, s.method, s.bound, s.param_name, s.param_value) = key;
        s.n = v.size();
        double sum = 0.0;
        for (double x : v) {
            sum += x;
        }
        s.mean = sum / static_cast<double>(s.n);
        std::sort(v.begin(), v.end());
        s.median = s.n % 2 == 1 ? v[s.n / 2] : 0.5 * (v[s.n / 2 - 1] + v[s.n / 2]);
        if (s.n > 1) {
            double ss = 0.0;
            for (double x : v) {
                ss += (x - s.mean) * (x - s.mean);
            }
            s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
        }
        const auto& drops = per_drop_sum[key];
        double drop_total = 0.0;
        for (const auto& [d, total] : drops) {
            drop_total += total;
        }
        s.mean_sum_se = drop_total / static_cast<double>(drops.size());
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "preset,method,bound,param_name,param_value,n,mean_se,median_se,std_error,mean_sum_se\n";
    for (const auto& s : rows) {
        out << s.preset << ',' << s.method << ',' << s.bound << ',' << s.param_name << ','
            << format_number(s.param_value) << ',' << s.n << ',' << format_number(s.mean) << ','
            << format_number(s.median) << ',' << format_number(s.std_error) << ',' << format_number(s.mean_sum_se)
            << '\n';
    }
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> out;
    out.reserve(values.size());
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

}  // namespace cfmimo
