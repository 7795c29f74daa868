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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cfmimo {

/// Version of the long-format CSV layout below. Bump on any column change.
inline constexpr int kResultSchemaVersion = 1;

/// Exact header of the results CSV.
inline constexpr const char* kResultHeader =
    "preset,method,bound,param_name,param_value,drop,user,se_bits_per_hz,seed,n_blocks";

struct ResultRow {
    std::string preset;
    std::string method;
    std::string bound;
    std::string param_name;
    double param_value = 0.0;
    int drop = 0;
    int user = 0;
    double se_bits_per_hz = 0.0;
    std::uint64_t seed = 0;
    int n_blocks = 0;
};

class ResultTable {
public:
    std::vector<ResultRow> rows;

    void write_csv(std::ostream& out) const;
    std::string to_csv() const;
    /// Throws DataError on a header mismatch (naming the offending column) or a malformed row.
    static ResultTable read_csv(std::istream& in);
};

/// Formats a double the way the CSV writer does ("%.12g").
std::string format_number(double v);

struct SummaryRow {
    std::string preset;
    std::string method;
    std::string bound;
    std::string param_name;
    double param_value = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double std_error = 0.0;
    /// Mean over drops of the per-drop sum over users.
    double mean_sum_se = 0.0;
};

/// Per (preset, method, bound, param_name, param_value) statistics in first-seen order.
std::vector<SummaryRow> summarize(const ResultTable& table);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

/// Empirical CDF: sorted values paired with F(x) = (index + 1) / n.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

}  // namespace cfmimo
