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

#include "irsmimo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "irsmimo/estimation.hpp"
#include "irsmimo/numerics.hpp"
#include "irsmimo/phase_design.hpp"

namespace irsmimo {

namespace {

using ordered_json = nlohmann::ordered_json;

// Fixed noise substream per estimator, so a record does not depend on which other
// estimators are enabled in the same trial.
constexpr uword stream_direct = 3;

uword noise_stream(Estimator e) {
    switch (e) {
        case Estimator::obo: return 4;
        case Estimator::coobo: return 5;
        case Estimator::spac: return 6;
        case Estimator::serom: return 7;
        case Estimator::all_zero: return 8;
        case Estimator::perfect:
        case Estimator::exhaustive: break;
    }
    throw InvalidInputError("noise_stream: estimator consumes no training noise");
}

bool uses_direct_training(Estimator e) {
    return e == Estimator::obo || e == Estimator::coobo || e == Estimator::spac ||
           e == Estimator::serom;
}

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void check_config(const ScenarioConfig& cfg, const char* what) {
    if (cfg.trials == 0)
        throw InvalidInputError(std::string(what) + ": at least one trial is required");
    if (cfg.coherence_len == 0)
        throw InvalidInputError(std::string(what) + ": coherence length must be at least 1");
    if (cfg.serom_periods == 0)
        throw InvalidInputError(std::string(what) + ": period count must be at least 1");
    for (double p : cfg.power_dbm)
        if (!std::isfinite(p))
            throw InvalidInputError(std::string(what) + ": power points must be finite");
    if (!std::isfinite(cfg.noise_dbm))
        throw InvalidInputError(std::string(what) + ": noise level must be finite");
}

struct EstimatorTaus {
    uword direct = 0;
    uword cascade = 0;
};

EstimatorTaus taus_for(Estimator e, const TrainingLengths& lens, uword m) {
    switch (e) {
        case Estimator::all_zero: return {m, 0};
        case Estimator::obo: return {m, lens.obo - m};
        case Estimator::coobo: return {m, lens.coobo - m};
        case Estimator::spac: return {m, lens.spac - m};
        case Estimator::serom: return {m, lens.serom - m};
        case Estimator::perfect:
        case Estimator::exhaustive: return {0, 0};
    }
    throw InvalidInputError("taus_for: unknown estimator");
}

std::uint64_t three_phase_slots(const ArrayGeometry& g) {
    std::uint64_t m = g.ue(), l = g.irs(), n = g.bs();
    std::uint64_t spread = ((m - 1) * l + n - 1) / n;
    return m + l + std::max(m - 1, spread);
}

TrialRecord evaluate_estimator(Estimator tag, const ScenarioConfig& cfg,
                               const ChannelSet& truth, const LinkBudget& budget,
                               const LinkBudget& training, const DirectEstimate& direct,
                               const TrainingLengths& lens, Rng& trial_rng, uword trial_index) {
    TrialRecord rec;
    rec.trial = trial_index;
    rec.estimator = tag;
    EstimatorTaus taus = taus_for(tag, lens, cfg.geometry.ue());
    rec.tau_d = taus.direct;
    rec.tau_c = taus.cascade;
    rec.tau_total = rec.tau_d + rec.tau_c;

    auto started = std::chrono::steady_clock::now();
    try {
        PhaseConfig phases;
        arma::cx_mat believed_total;
        RankPolicy bf_policy = RankPolicy::numerical;

        switch (tag) {
            case Estimator::perfect: {
                DesignConfig dc;
                dc.quant_bits = cfg.quant_bits;
                dc.rank_policy = RankPolicy::fixed;
                DesignResult dr = design_phases(truth.ue_bs, truth.rank_ones, budget, dc);
                phases = dr.phases;
                rec.design_sweeps = dr.sweeps;
                believed_total = total_channel(truth.ue_bs, truth.rank_ones, phases);
                bf_policy = RankPolicy::fixed;
                break;
            }
            case Estimator::exhaustive: {
                unsigned bits = cfg.quant_bits > 0 ? cfg.quant_bits : 1;
                SearchResult sr = exhaustive_search(truth.ue_bs, truth.rank_ones, budget, bits);
                phases = sr.phases;
                believed_total = total_channel(truth.ue_bs, truth.rank_ones, phases);
                bf_policy = RankPolicy::fixed;
                break;
            }
            case Estimator::all_zero: {
                Rng noise_rng = trial_rng.substream(noise_stream(tag));
                TotalChannelEstimate est = all_zero_baseline(truth, training, noise_rng);
                phases = PhaseConfig::all_on(cfg.geometry.irs());
                believed_total = est.estimate;
                break;
            }
            default: {
                Rng noise_rng = trial_rng.substream(noise_stream(tag));
                RankOneSet est;
                if (tag == Estimator::obo) {
                    est = obo_estimate(truth, training, direct, noise_rng);
                } else if (tag == Estimator::coobo) {
                    est = coobo_estimate(truth, training, direct, noise_rng);
                } else if (tag == Estimator::spac) {
                    est = spac_estimate(truth, training, direct, noise_rng).first;
                } else {
                    SeromPlan plan = build_serom_plan(cfg.serom_periods, cfg.geometry.irs(),
                                                      cfg.quant_bits);
                    est = serom_estimate(truth, training, plan, direct, noise_rng);
                }
                DesignConfig dc;
                dc.quant_bits = cfg.quant_bits;
                dc.rank_policy = RankPolicy::numerical;
                DesignResult dr =
                    design_phases(direct.estimate, est.rank_one_estimates, budget, dc);
                phases = dr.phases;
                rec.design_sweeps = dr.sweeps;
                believed_total =
                    total_channel(direct.estimate, est.rank_one_estimates, phases);
                break;
            }
        }

        BeamformerResult bf = transmit_beamformer(believed_total, bf_policy);
        SEReport rep = effective_spectral_efficiency(truth, phases, bf.transmit, bf.rank,
                                                     budget, cfg.coherence_len, rec.tau_total);
        rec.se_per_use = rep.per_use;
        rec.se_effective = rep.effective;
    } catch (const std::exception& ex) {
        rec.se_per_use = 0.0;
        rec.se_effective = 0.0;
        rec.error = ex.what();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep))
        parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& value, const std::string& key) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw InvalidInputError("config: bad number for " + key + ": " + value);
    }
    if (used != value.size())
        throw InvalidInputError("config: bad number for " + key + ": " + value);
    return v;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    size_t used = 0;
    std::uint64_t v = 0;
    try {
        // stoull would wrap a leading minus around instead of failing
        if (value.find('-') != std::string::npos)
            throw std::invalid_argument(value);
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw InvalidInputError("config: bad count for " + key + ": " + value);
    }
    if (used != value.size())
        throw InvalidInputError("config: bad count for " + key + ": " + value);
    return v;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "1" || value == "true")
        return true;
    if (value == "0" || value == "false")
        return false;
    throw InvalidInputError("config: bad flag for " + key + ": " + value);
}

std::vector<double> parse_power_list(const std::string& value) {
    if (value.find(':') != std::string::npos)
        return parse_power_range(value);
    std::vector<double> points;
    for (const std::string& part : split(value, ','))
        points.push_back(parse_double(trim(part), "power_dbm"));
    if (points.empty())
        throw InvalidInputError("config: power_dbm must list at least one point");
    return points;
}

std::vector<Estimator> parse_estimator_list(const std::string& value) {
    std::vector<Estimator> out;
    for (const std::string& part : split(value, ',')) {
        std::string tag = trim(part);
        if (!tag.empty())
            out.push_back(estimator_from_name(tag));
    }
    if (out.empty())
        throw InvalidInputError("config: estimator list is empty");
    return out;
}

}  // namespace

const char* estimator_name(Estimator e) {
    switch (e) {
        case Estimator::all_zero: return "allzero";
        case Estimator::obo: return "obo";
        case Estimator::coobo: return "coobo";
        case Estimator::spac: return "spac";
        case Estimator::serom: return "serom";
        case Estimator::perfect: return "perfect";
        case Estimator::exhaustive: return "exhaustive";
    }
    throw InvalidInputError("estimator_name: unknown estimator");
}

Estimator estimator_from_name(const std::string& name) {
    if (name == "allzero") return Estimator::all_zero;
    if (name == "obo") return Estimator::obo;
    if (name == "coobo") return Estimator::coobo;
    if (name == "spac") return Estimator::spac;
    if (name == "serom") return Estimator::serom;
    if (name == "perfect") return Estimator::perfect;
    if (name == "exhaustive") return Estimator::exhaustive;
    throw InvalidInputError("estimator_from_name: unknown estimator: " + name);
}

ScenarioConfig preset_config(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    cfg.power_dbm = parse_power_range("0:40:5");
    cfg.estimators = {Estimator::all_zero, Estimator::obo,  Estimator::coobo,
                      Estimator::spac,     Estimator::serom, Estimator::perfect};
    if (name == "small") {
        cfg.geometry = {2, 4, 2, 2, 2, 4};
        cfg.coherence_len = 150;
        cfg.quant_bits = 2;
        cfg.serom_periods = 5;
    } else if (name == "large") {
        cfg.geometry = {4, 8, 4, 4, 8, 16};
        cfg.coherence_len = 2400;
        cfg.quant_bits = 4;
        cfg.serom_periods = 23;
    } else if (name == "fig3") {
        cfg.geometry = {2, 2, 1, 2, 3, 3};
        cfg.coherence_len = 150;
        cfg.quant_bits = 2;
        cfg.serom_periods = 5;
        cfg.estimators = {Estimator::perfect, Estimator::exhaustive};
    } else {
        throw InvalidInputError("preset_config: unknown preset: " + name);
    }
    return cfg;
}

std::vector<double> parse_power_range(const std::string& range) {
    std::vector<std::string> parts = split(range, ':');
    if (parts.size() != 3)
        throw InvalidInputError("parse_power_range: expected LO:HI:STEP, got: " + range);
    double lo = parse_double(trim(parts[0]), "power range low");
    double hi = parse_double(trim(parts[1]), "power range high");
    double step = parse_double(trim(parts[2]), "power range step");
    if (!(step > 0.0))
        throw InvalidInputError("parse_power_range: step must be positive");
    if (hi < lo)
        throw InvalidInputError("parse_power_range: high end below low end");
    std::vector<double> points;
    for (double p = lo; p <= hi + 0.5 * step; p += step)
        points.push_back(p);
    return points;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_config_file: cannot open " + path);

    ScenarioConfig cfg = preset_config("small");
    cfg.name = "custom";

    std::string line, section;
    uword line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';')
            continue;
        if (text.front() == '[' && text.back() == ']') {
            section = trim(text.substr(1, text.size() - 2));
            if (section != "geometry" && section != "budget" && section != "sweep" &&
                section != "estimators" && section != "output")
                throw InvalidInputError("config: unknown section [" + section + "] at line " +
                                        std::to_string(line_no));
            continue;
        }
        size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw InvalidInputError("config: expected key = value at line " +
                                    std::to_string(line_no));
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));

        if (section == "geometry") {
            if (key == "bs_v") cfg.geometry.bs_v = parse_u64(value, key);
            else if (key == "bs_h") cfg.geometry.bs_h = parse_u64(value, key);
            else if (key == "ue_v") cfg.geometry.ue_v = parse_u64(value, key);
            else if (key == "ue_h") cfg.geometry.ue_h = parse_u64(value, key);
            else if (key == "irs_v") cfg.geometry.irs_v = parse_u64(value, key);
            else if (key == "irs_h") cfg.geometry.irs_h = parse_u64(value, key);
            else throw InvalidInputError("config: unknown geometry key: " + key);
        } else if (section == "budget") {
            if (key == "noise_dbm") cfg.noise_dbm = parse_double(value, key);
            else if (key == "coherence_len") cfg.coherence_len = parse_u64(value, key);
            else if (key == "quant_bits")
                cfg.quant_bits = static_cast<unsigned>(parse_u64(value, key));
            else if (key == "serom_periods") cfg.serom_periods = parse_u64(value, key);
            else throw InvalidInputError("config: unknown budget key: " + key);
        } else if (section == "sweep") {
            if (key == "power_dbm") cfg.power_dbm = parse_power_list(value);
            else if (key == "trials") cfg.trials = parse_u64(value, key);
            else if (key == "seed") cfg.master_seed = parse_u64(value, key);
            else throw InvalidInputError("config: unknown sweep key: " + key);
        } else if (section == "estimators") {
            if (key == "list") cfg.estimators = parse_estimator_list(value);
            else throw InvalidInputError("config: unknown estimators key: " + key);
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else if (key == "name") cfg.name = value;
            else if (key == "emit_plot_data") cfg.emit_plot_data = parse_bool(value, key);
            else throw InvalidInputError("config: unknown output key: " + key);
        } else {
            throw InvalidInputError("config: key outside any section at line " +
                                    std::to_string(line_no));
        }
    }
    return cfg;
}

std::vector<TrialRecord> run_trial(const ScenarioConfig& cfg, double p_dl_dbm,
                                   uword trial_index) {
    check_config(cfg, "run_trial");
    if (!std::isfinite(p_dl_dbm))
        throw InvalidInputError("run_trial: power point must be finite");

    LinkBudget budget;
    budget.uplink_power_w = dbm_to_watt(p_dl_dbm);
    budget.downlink_power_w = dbm_to_watt(p_dl_dbm);
    budget.noise_w = dbm_to_watt(cfg.noise_dbm);
    LinkBudget training = budget;
    if (cfg.training_noise_free)
        training.noise_w = 0.0;

    Rng trial_rng(mix_seed(cfg.master_seed, trial_index));
    ChannelSet truth = draw_scenario(cfg.geometry, budget, cfg.scenario, trial_rng);
    TrainingLengths lens = training_lengths(cfg.geometry, cfg.serom_periods);

    bool any_direct = false;
    for (Estimator e : cfg.estimators)
        any_direct = any_direct || uses_direct_training(e);
    DirectEstimate direct;
    if (any_direct) {
        Rng direct_rng = trial_rng.substream(stream_direct);
        direct = estimate_direct(truth, training, direct_rng);
    }

    std::vector<TrialRecord> records;
    records.reserve(cfg.estimators.size());
    for (Estimator tag : cfg.estimators)
        records.push_back(evaluate_estimator(tag, cfg, truth, budget, training, direct, lens,
                                             trial_rng, trial_index));
    return records;
}

SweepTable run_sweep(const ScenarioConfig& cfg) {
    check_config(cfg, "run_sweep");
    if (cfg.power_dbm.empty())
        throw InvalidInputError("run_sweep: the power axis is empty");
    if (cfg.estimators.empty())
        throw InvalidInputError("run_sweep: no estimators configured");

    SweepTable table;
    table.axis = "power_dbm";
    table.config = cfg;

    for (double p : cfg.power_dbm) {
        std::vector<std::vector<double>> eff(cfg.estimators.size());
        std::vector<std::vector<double>> per_use(cfg.estimators.size());
        std::vector<uword> tau(cfg.estimators.size(), 0);
        for (uword t = 0; t < cfg.trials; ++t) {
            std::vector<TrialRecord> recs = run_trial(cfg, p, t);
            for (size_t i = 0; i < recs.size(); ++i) {
                eff[i].push_back(recs[i].se_effective);
                per_use[i].push_back(recs[i].se_per_use);
                tau[i] = recs[i].tau_total;
            }
        }
        for (size_t i = 0; i < cfg.estimators.size(); ++i) {
            SweepRow row;
            row.axis_value = p;
            row.estimator = cfg.estimators[i];
            row.trials = cfg.trials;
            row.tau_total = tau[i];
            double n = static_cast<double>(cfg.trials);
            double mean_eff = 0.0, mean_pu = 0.0;
            for (double v : eff[i])
                mean_eff += v;
            for (double v : per_use[i])
                mean_pu += v;
            mean_eff /= n;
            mean_pu /= n;
            double var = 0.0;
            if (cfg.trials > 1) {
                for (double v : eff[i])
                    var += (v - mean_eff) * (v - mean_eff);
                var /= (n - 1.0);
            }
            row.mean_se_per_use = mean_pu;
            row.mean_se_eff = mean_eff;
            row.stderr_se_eff = cfg.trials > 1 ? std::sqrt(var / n) : 0.0;
            table.rows.push_back(row);
        }
    }
    return table;
}

std::string render_csv(const SweepTable& table) {
    std::string out = "axis_value,estimator,mean_se_per_use,mean_se_eff,stderr_se_eff,"
                      "tau_total,trials\n";
    for (const SweepRow& row : table.rows) {
        out += fmt12(row.axis_value);
        out += ',';
        out += estimator_name(row.estimator);
        out += ',';
        out += fmt12(row.mean_se_per_use);
        out += ',';
        out += fmt12(row.mean_se_eff);
        out += ',';
        out += fmt12(row.stderr_se_eff);
        out += ',';
        out += std::to_string(row.tau_total);
        out += ',';
        out += std::to_string(row.trials);
        out += '\n';
    }
    return out;
}

void emit_results(const SweepTable& table, const std::string& csv_path,
                  const std::string& json_path) {
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv)
            throw std::runtime_error("emit_results: cannot write " + csv_path);
        csv << render_csv(table);
        if (!csv)
            throw std::runtime_error("emit_results: write failed for " + csv_path);
    }

    const ScenarioConfig& cfg = table.config;
    ordered_json doc;
    doc["name"] = cfg.name;
    doc["master_seed"] = cfg.master_seed;
    doc["trials"] = cfg.trials;
    doc["axis"] = table.axis;
    doc["power_dbm"] = cfg.power_dbm;
    doc["geometry"] = {{"bs_v", cfg.geometry.bs_v},   {"bs_h", cfg.geometry.bs_h},
                       {"ue_v", cfg.geometry.ue_v},   {"ue_h", cfg.geometry.ue_h},
                       {"irs_v", cfg.geometry.irs_v}, {"irs_h", cfg.geometry.irs_h}};
    doc["coherence_len"] = cfg.coherence_len;
    doc["quant_bits"] = cfg.quant_bits;
    doc["serom_periods"] = cfg.serom_periods;
    doc["noise_dbm"] = cfg.noise_dbm;
    std::vector<std::string> names;
    for (Estimator e : cfg.estimators)
        names.push_back(estimator_name(e));
    doc["estimators"] = names;
    doc["scenario"] = {{"k_ue_bs_db", cfg.scenario.k_ue_bs_db},
                       {"k_irs_bs_db", cfg.scenario.k_irs_bs_db},
                       {"k_ue_irs_db", cfg.scenario.k_ue_irs_db},
                       {"paths_ue_bs", cfg.scenario.paths_ue_bs},
                       {"paths_irs_bs", cfg.scenario.paths_irs_bs},
                       {"paths_ue_irs", cfg.scenario.paths_ue_irs},
                       {"exp_ue_bs", cfg.scenario.exp_ue_bs},
                       {"exp_irs_bs", cfg.scenario.exp_irs_bs},
                       {"exp_ue_irs", cfg.scenario.exp_ue_irs},
                       {"ue_irs_dist", {cfg.scenario.ue_irs_dist_min, cfg.scenario.ue_irs_dist_max}},
                       {"irs_bs_dist", {cfg.scenario.irs_bs_dist_min, cfg.scenario.irs_bs_dist_max}}};
    doc["training_noise_free"] = cfg.training_noise_free;
    doc["out_dir"] = cfg.out_dir;
    doc["emit_plot_data"] = cfg.emit_plot_data;

    // Slot budgets for every simulated technique plus the literature baselines that are
    // reported for context but not implemented here.
    TrainingLengths lens = training_lengths(cfg.geometry, cfg.serom_periods);
    doc["training_slots"] = {{"allzero", lens.all_zero}, {"coobo", lens.coobo},
                             {"spac", lens.spac},        {"serom", lens.serom},
                             {"obo", lens.obo},          {"lskrf", lens.obo},
                             {"mmse_dft", lens.obo},
                             {"three_phase", three_phase_slots(cfg.geometry)}};

    std::ofstream json(json_path, std::ios::binary);
    if (!json)
        throw std::runtime_error("emit_results: cannot write " + json_path);
    json << doc.dump(2) << '\n';
    if (!json)
        throw std::runtime_error("emit_results: write failed for " + json_path);
}

void emit_plot_data(const SweepTable& table, const std::string& dir) {
    std::vector<Estimator> seen;
    for (const SweepRow& row : table.rows)
        if (std::find(seen.begin(), seen.end(), row.estimator) == seen.end())
            seen.push_back(row.estimator);

    for (Estimator e : seen) {
        for (const char* metric : {"se_eff", "se_per_use"}) {
            std::string path = dir + "/" + metric + "_" + estimator_name(e) + ".dat";
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw std::runtime_error("emit_plot_data: cannot write " + path);
            for (const SweepRow& row : table.rows) {
                if (row.estimator != e)
                    continue;
                double y = std::string(metric) == "se_eff" ? row.mean_se_eff
                                                           : row.mean_se_per_use;
                out << fmt12(row.axis_value) << ' ' << fmt12(y) << '\n';
            }
            if (!out)
                throw std::runtime_error("emit_plot_data: write failed for " + path);
        }
    }
}

}  // namespace irsmimo
