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

#include "cfmimo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "cfmimo/parallel.hpp"

namespace cfmimo {

namespace {

int as_int(const std::string& name, double value) {
    if (std::floor(value) != value || std::abs(value) > 1e9) {
        throw ConfigError("parameter " + name + " must be an integer, got " + format_number(value));
    }
    return static_cast<int>(value);
}

std::vector<double> range(int lo, int hi) {
    std::vector<double> v;
    for (int x = lo; x <= hi; ++x) {
        v.push_back(x);
    }
    return v;
}

struct PresetInfo {
    std::string description;
    ExperimentSpec (*make)();
};

ExperimentSpec sweep(const std::string& preset, const std::string& param, std::vector<double> values,
                     std::vector<Method> methods, std::vector<Bound> bounds) {
    ExperimentSpec s;
    s.preset = preset;
    s.sweep_param = param;
    s.sweep_values = std::move(values);
    s.methods = std::move(methods);
    s.bounds = std::move(bounds);
    return s;
}

const std::map<std::string, PresetInfo>& presets() {
    static const std::map<std::string, PresetInfo> table = {
        {"fig2",
         {"average SE vs N for the three transmission methods (M = 2)",
          [] {
              return sweep("fig2", "N", range(1, 8),
                           {Method::same, Method::separate_local, Method::separate_csi}, {Bound::pilots});
          }}},
        {"fig3",
         {"average SE vs angular standard deviation (N = 4, M = 2)",
          [] {
              return sweep("fig3", "asd_deg", {2, 5, 10, 15, 20, 30, 45, 60},
                           {Method::same, Method::separate_local, Method::separate_csi}, {Bound::pilots});
          }}},
        {"fig4",
         {"SE vs number of users K = 2..10, pilots grow with K (N = 4, M = 2)",
          [] {
              return sweep("fig4", "K", range(2, 10),
                           {Method::same, Method::separate_local, Method::separate_csi}, {Bound::pilots});
          }}},
        {"fig5",
         {"MMSE vs ZF receive combining vs user antennas M",
          [] { return sweep("fig5", "M", {1, 2, 4}, {Method::same}, {Bound::pilots, Bound::pilotsZF}); }}},
        {"fig6",
         {"MMSE vs ZF combining vs M for coherence blocks of 200 and 1000 symbols",
          [] {
              ExperimentSpec s;
              s.preset = "fig6";
              s.methods = {Method::same};
              s.bounds = {Bound::pilots, Bound::pilotsZF};
              for (int tau_c : {200, 1000}) {
                  for (int m : {1, 2, 4}) {
                      s.grid.push_back({"M@tau_c=" + std::to_string(tau_c), static_cast<double>(m),
                                        {{"M", m}, {"tau_c", tau_c}}});
                  }
              }
              return s;
          }}},
        {"fig7",
         {"noCSI / fullCSI / pilots bounds vs N, M = 1, i.i.d. fading",
          [] {
              auto s = sweep("fig7", "N", range(1, 8), {Method::same},
                             {Bound::noCSI, Bound::fullCSI, Bound::pilots});
              s.base.M = 1;
              s.base.fading = Fading::iid;
              return s;
          }}},
        {"fig8",
         {"noCSI / fullCSI / pilots bounds vs N, M = 2",
          [] {
              return sweep("fig8", "N", range(1, 8), {Method::same}, {Bound::noCSI, Bound::fullCSI, Bound::pilots});
          }}},
        {"fig9",
         {"single AP (L = 1) with many antennas, noCSI / fullCSI / pilots, M = 2",
          [] {
              auto s = sweep("fig9", "N", {10, 20, 40, 80}, {Method::same},
                             {Bound::noCSI, Bound::fullCSI, Bound::pilots});
              s.base.L = 1;
              return s;
          }}},
        {"fig10",
         {"separate streams with CSI sharing vs per-antenna single-user baseline, vs N",
          [] {
              return sweep("fig10", "N", range(1, 8), {Method::separate_csi, Method::per_antenna_baseline},
                           {Bound::pilots, Bound::noCSI});
          }}},
    };
    return table;
}

}  // namespace

void apply_parameter(SystemConfig& c, const std::string& name, double value) {
    if (name == "L") {
        c.L = as_int(name, value);
    } else if (name == "N") {
        c.N = as_int(name, value);
    } else if (name == "K") {
        c.K = as_int(name, value);
    } else if (name == "M") {
        c.M = as_int(name, value);
    } else if (name == "tau_c") {
        c.tau_c = as_int(name, value);
    } else if (name == "tau_p") {
        c.tau_p = as_int(name, value);
    } else if (name == "area_side") {
        c.area_side = value;
    } else if (name == "asd_deg") {
        c.asd_deg = value;
    } else if (name == "ul_power") {
        c.ul_power = value;
    } else if (name == "dl_power") {
        c.dl_power = value;
    } else if (name == "antenna_spacing") {
        c.antenna_spacing = value;
    } else if (name == "shadowing_db") {
        c.shadowing_db = value;
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

bool is_sweepable(const std::string& name) {
    SystemConfig probe;
    try {
        apply_parameter(probe, name, 1.0);
    } catch (const ConfigError&) {
        return false;
    }
    return true;
}

std::vector<GridPoint> ExperimentSpec::expand() const {
    if (!grid.empty()) {
        std::vector<GridPoint> out;
        for (const auto& g : grid) {
            GridPoint p{g.param_name, g.param_value, base};
            for (const auto& [name, value] : g.fields) {
                apply_parameter(p.config, name, value);
            }
            out.push_back(p);
        }
        return out;
    }
    if (sweep_param.empty()) {
        return {GridPoint{"none", 0.0, base}};
    }
    std::vector<GridPoint> out;
    for (double v : sweep_values) {
        GridPoint g{sweep_param, v, base};
        apply_parameter(g.config, sweep_param, v);
        out.push_back(g);
    }
    return out;
}

void ExperimentSpec::validate() const {
    if (methods.empty()) {
        throw ConfigError("experiment needs at least one method");
    }
    if (bounds.empty()) {
        throw ConfigError("experiment needs at least one bound");
    }
    if (n_drops < 1) {
        throw ConfigError("drops must be positive");
    }
    if (n_blocks < 2) {
        throw ConfigError("blocks must be at least 2");
    }
    if (grid.empty() && !sweep_param.empty()) {
        if (sweep_values.empty()) {
            throw ConfigError("sweep over '" + sweep_param + "' has no values");
        }
        if (!is_sweepable(sweep_param)) {
            throw ConfigError("unknown sweep parameter '" + sweep_param + "'");
        }
    }
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, info] : presets()) {
        names.push_back(name);
    }
    // Numeric order (fig2 .. fig10) rather than lexicographic.
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
        return std::stoi(a.substr(3)) < std::stoi(b.substr(3));
    });
    return names;
}

std::string preset_description(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return it->second.description;
}

ExperimentSpec make_preset(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return it->second.make();
}

RngSeed drop_seed(RngSeed master, int drop) {
    return derive_seed(master, {tag(StreamTag::drop), static_cast<std::uint64_t>(drop)});
}

ResultTable run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    spec.validate();
    std::ostream& log = options.log != nullptr ? *options.log : std::cerr;
    const auto points = spec.expand();
    const auto drops = static_cast<std::size_t>(spec.n_drops);

    DropOptions dopt;
    dopt.n_blocks = spec.n_blocks;
    dopt.schedule_streams = spec.schedule_streams;
    dopt.assignment = spec.assignment;
    dopt.workers = 1;

    // One slot per (grid point, drop); an empty string marks success.
    std::vector<std::vector<MethodResult>> results(points.size() * drops);
    std::vector<std::string> errors(points.size() * drops);
    parallel_for(points.size() * drops, options.workers, [&](std::size_t j) {
        const auto& point = points[j / drops];
        const int d = static_cast<int>(j % drops);
        try {
            DropSimulation sim(point.config, drop_seed(spec.seed, d), dopt);
            results[j] = sim.run(spec.methods, spec.bounds);
        } catch (const std::exception& e) {
            errors[j] = std::string("drop ") + std::to_string(d) + ": " + e.what();
        }
    });

    ResultTable table;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const auto& point = points[p];
        std::string failure;
        for (std::size_t d = 0; d < drops && failure.empty(); ++d) {
            failure = errors[p * drops + d];
        }
        if (!failure.empty()) {
            log << "warning: " << spec.preset << " grid point " << point.param_name << "="
                << format_number(point.param_value) << " skipped (" << failure << ")\n";
            continue;
        }
        for (std::size_t d = 0; d < drops; ++d) {
            for (const auto& mr : results[p * drops + d]) {
                for (auto bound : spec.bounds) {
                    for (std::size_t k = 0; k < mr.users.size(); ++k) {
                        ResultRow row;
                        row.preset = spec.preset;
                        row.method = to_string(mr.method);
                        row.bound = to_string(bound);
                        row.param_name = point.param_name;
                        row.param_value = point.param_value;
                        row.drop = static_cast<int>(d);
                        row.user = static_cast<int>(k);
                        row.se_bits_per_hz = mr.users[k][bound];
                        row.seed = spec.seed;
                        row.n_blocks = spec.n_blocks;
                        table.rows.push_back(std::move(row));
                    }
                }
            }
        }
    }
    return table;
}

}  // namespace cfmimo
