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

#include "cfmimo/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cfmimo {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (allowed.count(key) == 0) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

int get_int(const json& obj, const std::string& key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError("'" + key + "' in " + where + " must be an integer");
    }
    return get<int>(obj, key, where);
}

void apply_system(const json& sys, SystemConfig& c) {
    static const std::set<std::string> keys = {"L", "N", "K", "M", "tau_c", "tau_p", "area_side", "asd_deg",
                                               "ul_power", "dl_power", "antenna_spacing", "shadowing_db",
                                               "noise_dbm", "height_offset", "fading"};
    const std::string where = "system";
    reject_unknown(sys, keys, where);
    for (const auto& [key, value] : sys.items()) {
        if (key == "fading") {
            c.fading = parse_fading(get<std::string>(sys, key, where));
        } else if (key == "noise_dbm") {
            c.noise_dbm = get<double>(sys, key, where);
        } else if (key == "height_offset") {
            c.height_offset = get<double>(sys, key, where);
        } else if (key == "L" || key == "N" || key == "K" || key == "M" || key == "tau_c" || key == "tau_p") {
            apply_parameter(c, key, get_int(sys, key, where));
        } else {
            apply_parameter(c, key, get<double>(sys, key, where));
        }
    }
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

ExperimentSpec parse_experiment_json(const std::string& text) {
    const json doc = parse(text);
    static const std::set<std::string> keys = {"preset", "system", "sweep", "methods", "bounds", "drops",
                                               "blocks", "seed", "schedule_streams", "pilot_assignment"};
    const std::string where = "experiment config";
    reject_unknown(doc, keys, where);

    ExperimentSpec spec;
    if (doc.contains("preset")) {
        spec = make_preset(get<std::string>(doc, "preset", where));
    }
    if (doc.contains("system")) {
        apply_system(doc.at("system"), spec.base);
    }
    if (doc.contains("sweep")) {
        const auto& sw = doc.at("sweep");
        reject_unknown(sw, {"param", "values"}, "sweep");
        spec.grid.clear();
        spec.sweep_param = get<std::string>(sw, "param", "sweep");
        spec.sweep_values = get<std::vector<double>>(sw, "values", "sweep");
    }
    if (doc.contains("methods")) {
        spec.methods.clear();
        for (const auto& s : get<std::vector<std::string>>(doc, "methods", where)) {
            spec.methods.push_back(parse_method(s));
        }
    }
    if (doc.contains("bounds")) {
        spec.bounds.clear();
        for (const auto& s : get<std::vector<std::string>>(doc, "bounds", where)) {
            spec.bounds.push_back(parse_bound(s));
        }
    }
    if (doc.contains("drops")) {
        spec.n_drops = get_int(doc, "drops", where);
    }
    if (doc.contains("blocks")) {
        spec.n_blocks = get_int(doc, "blocks", where);
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw ConfigError("'seed' must be a non-negative integer");
        }
        spec.seed = get<std::uint64_t>(doc, "seed", where);
    }
    if (doc.contains("schedule_streams")) {
        spec.schedule_streams = get<bool>(doc, "schedule_streams", where);
    }
    if (doc.contains("pilot_assignment")) {
        const auto s = get<std::string>(doc, "pilot_assignment", where);
        if (s == "greedy") {
            spec.assignment = PilotAssignment::greedy;
        } else if (s == "round_robin") {
            spec.assignment = PilotAssignment::round_robin;
        } else {
            throw ConfigError("pilot_assignment must be greedy or round_robin");
        }
    }
    spec.validate();
    for (const auto& g : spec.expand()) {
        g.config.validate();
    }
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_json(ss.str());
}

SystemConfig parse_system_json(const std::string& text, SystemConfig base) {
    apply_system(parse(text), base);
    return base;
}

std::string to_json(const SystemConfig& c) {
    json j = {{"L", c.L},
              {"N", c.N},
              {"K", c.K},
              {"M", c.M},
              {"tau_c", c.tau_c},
              {"tau_p", c.pilot_length()},
              {"area_side", c.area_side},
              {"asd_deg", c.asd_deg},
              {"ul_power", c.ul_power},
              {"dl_power", c.dl_power},
              {"antenna_spacing", c.antenna_spacing},
              {"shadowing_db", c.shadowing_db},
              {"noise_dbm", c.noise_dbm},
              {"height_offset", c.height_offset},
              {"fading", to_string(c.fading)}};
    return j.dump();
}

}  // namespace cfmimo
