// SPDX-License-Identifier: Apache-2.0
//
// irsmimo: intelligent-reflecting-surface SU-MIMO link simulator
// Copyright (C) 2026 the irsmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

// Command-line front end: pick a preset or config file, apply overrides, run the power
// sweep, and write the CSV results plus the JSON sidecar (and optional plot series).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsmimo/harness.hpp"

namespace {

using namespace irsmimo;

std::vector<Estimator> parse_estimators(const std::string& list) {
    std::vector<Estimator> tags;
    std::string cur;
    for (char c : list + ",") {
        if (c == ',') {
            size_t a = cur.find_first_not_of(" \t");
            size_t b = cur.find_last_not_of(" \t");
            if (a != std::string::npos)
                tags.push_back(estimator_from_name(cur.substr(a, b - a + 1)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (tags.empty())
        throw InvalidInputError("--estimators: the list is empty");
    return tags;
}

void print_summary(const SweepTable& table) {
    const ScenarioConfig& cfg = table.config;
    std::printf("scenario %s: BS %llux%llu, UE %llux%llu, IRS %llux%llu, B=%u, Q=%llu, "
                "coherence %llu\n",
                cfg.name.c_str(), (unsigned long long)cfg.geometry.bs_v,
                (unsigned long long)cfg.geometry.bs_h, (unsigned long long)cfg.geometry.ue_v,
                (unsigned long long)cfg.geometry.ue_h, (unsigned long long)cfg.geometry.irs_v,
                (unsigned long long)cfg.geometry.irs_h, cfg.quant_bits,
                (unsigned long long)cfg.serom_periods, (unsigned long long)cfg.coherence_len);
    std::printf("%llu trials per point, seed %llu\n\n", (unsigned long long)cfg.trials,
                (unsigned long long)cfg.master_seed);

    std::printf("mean effective rate (bit/s/Hz)\n%10s", "P [dBm]");
    for (Estimator e : cfg.estimators)
        std::printf(" %12s", estimator_name(e));
    std::printf("\n");
    size_t n_est = cfg.estimators.size();
    for (size_t p = 0; p * n_est < table.rows.size(); ++p) {
        std::printf("%10.4g", table.rows[p * n_est].axis_value);
        for (size_t e = 0; e < n_est; ++e)
            std::printf(" %12.4f", table.rows[p * n_est + e].mean_se_eff);
        std::printf("\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-assisted MIMO link simulator: channel estimation and phase design"};

    std::string preset, config_path, power_range, estimator_list, out_dir;
    std::uint64_t trials = 0, seed = 0, gamma = 0;
    bool plot_data = false;

    CLI::Option* preset_opt =
        app.add_option("--preset", preset, "named scenario: small, large, or fig3");
    CLI::Option* config_opt =
        app.add_option("--config", config_path, "scenario file (INI sections)");
    preset_opt->excludes(config_opt);
    config_opt->excludes(preset_opt);
    app.add_option("--trials", trials, "Monte Carlo trials per sweep point");
    app.add_option("--seed", seed, "master seed for the trial streams");
    app.add_option("--power-dbm-range", power_range, "sweep axis as LO:HI:STEP in dBm");
    app.add_option("--gamma", gamma, "coherence block length in slots");
    app.add_option("--out", out_dir, "output directory (created if missing)");
    app.add_option("--estimators", estimator_list,
                   "comma list of allzero,obo,coobo,spac,serom,perfect,exhaustive");
    app.add_flag("--emit-plot-data", plot_data, "also write two-column series files");

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig cfg = config_path.empty()
                                 ? preset_config(preset.empty() ? "small" : preset)
                                 : load_config_file(config_path);
        if (trials > 0)
            cfg.trials = trials;
        if (app.count("--seed"))
            cfg.master_seed = seed;
        if (!power_range.empty())
            cfg.power_dbm = parse_power_range(power_range);
        if (gamma > 0)
            cfg.coherence_len = gamma;
        if (!estimator_list.empty())
            cfg.estimators = parse_estimators(estimator_list);
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (plot_data)
            cfg.emit_plot_data = true;

        std::filesystem::create_directories(cfg.out_dir);

        // Sweep one power point at a time so long runs show progress; the merged rows
        // are identical to a single run_sweep call because trials reseed per point.
        SweepTable table;
        table.config = cfg;
        auto t0 = std::chrono::steady_clock::now();
        for (size_t p = 0; p < cfg.power_dbm.size(); ++p) {
            ScenarioConfig point = cfg;
            point.power_dbm = {cfg.power_dbm[p]};
            SweepTable part = run_sweep(point);
            table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
            double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
            std::fprintf(stderr, "point %zu/%zu (%.4g dBm) done, %.1f s elapsed\n", p + 1,
                         cfg.power_dbm.size(), cfg.power_dbm[p], dt);
        }

        std::string csv_path = cfg.out_dir + "/" + cfg.name + "_results.csv";
        std::string json_path = cfg.out_dir + "/" + cfg.name + "_config.json";
        emit_results(table, csv_path, json_path);
        if (cfg.emit_plot_data)
            emit_plot_data(table, cfg.out_dir);

        print_summary(table);
        std::printf("\nwrote %s\nwrote %s\n", csv_path.c_str(), json_path.c_str());
        if (cfg.emit_plot_data)
            std::printf("wrote plot series under %s\n", cfg.out_dir.c_str());
        return 0;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
