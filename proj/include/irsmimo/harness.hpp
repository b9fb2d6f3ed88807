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

#pragma once

// Monte Carlo harness: scenario configuration, seeded trial execution that runs every
// configured estimator on the same drawn channel, sweep aggregation, and the CSV/JSON
// output layer. Determinism contract: a (master seed, trial index) pair fixes the channel
// and every noise realization, independent of which estimators are enabled, so runs are
// reproducible and estimator subsets stay comparable.

#include <cstdint>
#include <string>
#include <vector>

#include "irsmimo/channel.hpp"
#include "irsmimo/common.hpp"

namespace irsmimo {

enum class Estimator {
    all_zero,    // no per-element training, beamformer from the composite estimate
    obo,         // element-by-element pilot blocks
    coobo,       // two coupled slots per element with analog feedback
    spac,        // trained cross on the surface plus structured reconstruction
    serom,       // stacked periods with a wideband surface schedule
    perfect,     // design on the true channels, zero training charge
    exhaustive,  // brute-force quantized design on the true channels, zero training charge
};

const char* estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& name);

struct ScenarioConfig {
    std::string name = "custom";
    ArrayGeometry geometry{2, 4, 2, 2, 2, 4};
    std::vector<double> power_dbm;  // downlink (= uplink) transmit power sweep axis
    uword coherence_len = 150;
    unsigned quant_bits = 2;
    uword serom_periods = 5;
    uword trials = 500;
    std::uint64_t master_seed = 1;
    double noise_dbm = -89.0;
    std::vector<Estimator> estimators;
    ScenarioParams scenario;
    std::string out_dir = ".";
    bool emit_plot_data = false;

    // Test hook: zero the noise during training only, leaving data-phase powers alone.
    bool training_noise_free = false;
};

// Named baseline setups: "small", "large" (the two array-size regimes), and "fig3"
// (tiny arrays where brute-force design is feasible, perfect-knowledge comparison).
ScenarioConfig preset_config(const std::string& name);

// Flat INI-style file with sections [geometry], [budget], [sweep], [estimators],
// [output]; unknown keys are errors. Values left out keep the "small" preset defaults.
ScenarioConfig load_config_file(const std::string& path);

// "LO:HI:STEP" in dBm, endpoints inclusive (within half a step).
std::vector<double> parse_power_range(const std::string& range);

struct TrialRecord {
    uword trial = 0;
    Estimator estimator = Estimator::all_zero;
    uword tau_d = 0;
    uword tau_c = 0;
    uword tau_total = 0;
    double se_per_use = 0.0;
    double se_effective = 0.0;
    uword design_sweeps = 0;
    double wall_seconds = 0.0;
    std::string error;  // non-empty when this estimator failed; se fields are then 0
};

// One seeded trial at one power point: draws a channel, runs every configured estimator
// against it (sharing the direct-link training), designs phases from each estimate, and
// scores per-use and overhead-discounted rates against the true channel.
std::vector<TrialRecord> run_trial(const ScenarioConfig& config, double p_dl_dbm,
                                   uword trial_index);

struct SweepRow {
    double axis_value = 0.0;
    Estimator estimator = Estimator::all_zero;
    double mean_se_per_use = 0.0;
    double mean_se_eff = 0.0;
    double stderr_se_eff = 0.0;
    uword tau_total = 0;
    uword trials = 0;
};

struct SweepTable {
    std::string axis = "power_dbm";
    std::vector<SweepRow> rows;  // axis-major, estimators in configuration order
    ScenarioConfig config;
};

SweepTable run_sweep(const ScenarioConfig& config);

// CSV text for the table, 12 significant digits per value; exposed so tests can check
// the parse-back round trip without touching the filesystem.
std::string render_csv(const SweepTable& table);

// Writes the CSV and a JSON sidecar carrying the full configuration, the master seed,
// and the per-technique training-slot budget (including literature baselines that are
// reported but not simulated).
void emit_results(const SweepTable& table, const std::string& csv_path,
                  const std::string& json_path);

// Two-column series files (axis value, mean), one per metric and estimator.
void emit_plot_data(const SweepTable& table, const std::string& dir);

}  // namespace irsmimo
