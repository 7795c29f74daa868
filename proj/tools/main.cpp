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

// Command-line front end: run presets or JSON experiments, print cost tables,
// list presets, summarize result CSVs.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cfmimo/config_io.hpp"
#include "cfmimo/cost_accounting.hpp"
#include "cfmimo/experiment.hpp"

namespace {

using namespace cfmimo;

struct RunArgs {
    std::string preset;
    std::string config;
    std::string out = "-";
    std::uint64_t seed = 1;
    bool seed_set = false;
    unsigned workers = 1;
    int drops = 0;
    int blocks = 0;
};

ExperimentSpec resolve_spec(const std::string& preset, const std::string& config) {
    if (!config.empty()) {
        return load_experiment_file(config);
    }
    if (!preset.empty()) {
        return make_preset(preset);
    }
    throw ConfigError("either --preset or --config is required");
}

template <typename F>
int with_output(const std::string& path, F&& write) {
    if (path == "-") {
        write(std::cout);
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 1;
    }
    write(out);
    return out ? 0 : 1;
}

int do_run(const RunArgs& a) {
    ExperimentSpec spec = resolve_spec(a.preset, a.config);
    if (a.seed_set) {
        spec.seed = a.seed;
    }
    if (a.drops > 0) {
        spec.n_drops = a.drops;
    }
    if (a.blocks > 0) {
        spec.n_blocks = a.blocks;
    }
    RunOptions opt;
    opt.workers = a.workers;
    const ResultTable table = run_experiment(spec, opt);
    std::cerr << spec.preset << ": " << table.rows.size() << " rows (" << spec.n_drops << " drops x "
              << spec.n_blocks << " blocks, seed " << spec.seed << ")\n";
    return with_output(a.out, [&](std::ostream& os) { table.write_csv(os); });
}

int do_cost(const std::string& preset, const std::string& config, const std::string& out) {
    const ExperimentSpec spec = resolve_spec(preset, config);
    return with_output(out, [&](std::ostream& os) {
        os << "preset,param_name,param_value,L,N,K,M,tau_c,tau_p,ul_estimation_mults,precoder_mults,"
              "fronthaul_pilot_scalars_per_ap,fronthaul_data_scalars_per_ap\n";
        for (const auto& g : spec.expand()) {
            const auto& c = g.config;
            const CostReport r = cost_report(c);
            os << spec.preset << ',' << g.param_name << ',' << format_number(g.param_value) << ',' << c.L << ','
               << c.N << ',' << c.K << ',' << c.M << ',' << c.tau_c << ',' << c.pilot_length() << ','
               << r.ul_estimation_mults << ',' << r.precoder_mults << ',' << r.fronthaul_pilot_scalars << ','
               << r.fronthaul_data_scalars << '\n';
        }
    });
}

int do_summarize(const std::string& in_path, const std::string& out) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "error: cannot read '" << in_path << "'\n";
        return 1;
    }
    const auto table = ResultTable::read_csv(in);
    if (table.rows.empty()) {
        std::cerr << "warning: '" << in_path << "' has no rows\n";
    }
    return with_output(out, [&](std::ostream& os) { write_summary_csv(summarize(table), os); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfmimo: cell-free massive MIMO downlink simulator with multi-antenna users"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "run a preset or JSON experiment and write the results CSV");
    run_cmd->add_option("--preset", run.preset, "preset name (see list-presets)");
    run_cmd->add_option("--config", run.config, "JSON experiment file")->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--out", run.out, "output CSV path ('-' for stdout)");
    run_cmd->add_option("--workers", run.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    run_cmd->add_option("--drops", run.drops, "override the number of network drops")->check(CLI::PositiveNumber);
    run_cmd->add_option("--blocks", run.blocks, "override coherence blocks per drop")->check(CLI::Range(2, 1 << 30));

    std::string cost_preset, cost_config, cost_out = "-";
    auto* cost_cmd = app.add_subcommand("cost", "complexity and fronthaul counts per grid point");
    cost_cmd->add_option("--config", cost_config, "JSON experiment file")->check(CLI::ExistingFile);
    cost_cmd->add_option("--preset", cost_preset, "preset name");
    cost_cmd->add_option("--out", cost_out, "output CSV path ('-' for stdout)");

    auto* list_cmd = app.add_subcommand("list-presets", "list experiment presets");

    std::string sum_in, sum_out = "-";
    auto* sum_cmd = app.add_subcommand("summarize", "per-group mean/median/sum SE of a results CSV");
    sum_cmd->add_option("--in", sum_in, "results CSV")->required()->check(CLI::ExistingFile);
    sum_cmd->add_option("--out", sum_out, "output CSV path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);
    run.seed_set = run_cmd->count("--seed") > 0;

    try {
        if (*run_cmd) {
            return do_run(run);
        }
        if (*cost_cmd) {
            return do_cost(cost_preset, cost_config, cost_out);
        }
        if (*list_cmd) {
            for (const auto& name : preset_names()) {
                std::cout << name << "\t" << preset_description(name) << '\n';
            }
            return 0;
        }
        if (*sum_cmd) {
            return do_summarize(sum_in, sum_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
