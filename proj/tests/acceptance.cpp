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
//
// Acceptance gate. Each numbered check prints exactly one [PASS]/[FAIL] line with its
// wall time, and the process exits with the number of failed checks. The checks run the
// heavy end-to-end paths (dense grid searches, exhaustive phase enumeration, full Monte
// Carlo sweeps), so this binary takes minutes rather than the seconds of the unit suites.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "irsmimo/channel.hpp"
#include "irsmimo/common.hpp"
#include "irsmimo/estimation.hpp"
#include "irsmimo/harness.hpp"
#include "irsmimo/phase_design.hpp"
#include "test_support.hpp"

namespace ts = test_support;
using namespace irsmimo;

namespace {

struct CheckResult {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

// ------------------------------------------------------------------------------------------------
// check 1: training-length accounting
// ------------------------------------------------------------------------------------------------

CheckResult check_training_lengths() {
    CheckResult r;
    ArrayGeometry small{2, 4, 2, 2, 2, 4};
    ArrayGeometry large{4, 8, 4, 4, 8, 16};

    TrainingLengths s = training_lengths(small, 5);
    TrainingLengths l = training_lengths(large, 23);

    auto expect = [&](const char* tag, uword got, uword want) {
        if (got != want) {
            r.ok = false;
            r.detail += fmt(" %s=%llu(want %llu)", tag, (unsigned long long)got,
                            (unsigned long long)want);
        }
    };
    expect("small.direct", s.direct, 4);
    expect("small.all_zero", s.all_zero, 4);
    expect("small.coobo", s.coobo, 20);
    expect("small.spac", s.spac, 24);
    expect("small.serom", s.serom, 24);
    expect("small.obo", s.obo, 36);
    expect("large.direct", l.direct, 16);
    expect("large.all_zero", l.all_zero, 16);
    expect("large.coobo", l.coobo, 272);
    expect("large.spac", l.spac, 384);
    expect("large.serom", l.serom, 384);
    expect("large.obo", l.obo, 2064);
    if (r.ok)
        r.detail = "small {4,20,24,24,36}, large {16,272,384,384,2064}";
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 2: noiseless training recovers every cascade term
// ------------------------------------------------------------------------------------------------

double worst_element_error(const RankOneSet& est, const ChannelSet& truth) {
    double worst = 0.0;
    for (std::size_t l = 0; l < truth.rank_ones.size(); ++l) {
        double denom = arma::norm(truth.rank_ones[l], "fro");
        double err = arma::norm(est.rank_one_estimates[l] - truth.rank_ones[l], "fro") / denom;
        worst = std::max(worst, err);
    }
    return worst;
}

CheckResult check_noiseless_exactness() {
    CheckResult r;
    ArrayGeometry g{2, 4, 2, 2, 2, 4};
    LinkBudget quiet;
    quiet.uplink_power_w = quiet.downlink_power_w = dbm_to_watt(30.0);
    quiet.noise_w = 0.0;

    SeromPlan plan = build_serom_plan(g.irs(), g.irs(), 0);
    ScenarioParams rich;
    ScenarioParams los;
    los.paths_ue_bs = los.paths_irs_bs = los.paths_ue_irs = 0;

    double worst_obo = 0.0, worst_coobo = 0.0, worst_serom = 0.0, worst_spac = 0.0;
    for (int t = 0; t < 100; ++t) {
        Rng rng(mix_seed(4242, t));
        ChannelSet cs = draw_scenario(g, quiet, rich, rng);
        Rng nd = rng.substream(3);
        DirectEstimate direct = estimate_direct(cs, quiet, nd);

        Rng n1 = rng.substream(4), n2 = rng.substream(5), n3 = rng.substream(7);
        worst_obo = std::max(worst_obo, worst_element_error(obo_estimate(cs, quiet, direct, n1), cs));
        worst_coobo =
            std::max(worst_coobo, worst_element_error(coobo_estimate(cs, quiet, direct, n2), cs));
        worst_serom = std::max(
            worst_serom, worst_element_error(serom_estimate(cs, quiet, plan, direct, n3), cs));

        Rng rng_los(mix_seed(4343, t));
        ChannelSet ls = draw_scenario(g, quiet, los, rng_los);
        Rng nd2 = rng_los.substream(3);
        DirectEstimate direct_los = estimate_direct(ls, quiet, nd2);
        Rng n4 = rng_los.substream(6);
        worst_spac = std::max(
            worst_spac, worst_element_error(spac_estimate(ls, quiet, direct_los, n4).first, ls));
    }

    r.ok = worst_obo < 1e-8 && worst_coobo < 1e-8 && worst_serom < 1e-8 && worst_spac < 1e-8;
    r.detail = fmt("worst rel err obo %.1e coobo %.1e serom %.1e spac(LoS) %.1e", worst_obo,
                   worst_coobo, worst_serom, worst_spac);
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 3: closed-form element phase vs a dense determinant grid
// ------------------------------------------------------------------------------------------------

// Determinant of a row-major n x n complex matrix, n <= 4, by direct cofactor expansion.
// Written out by hand so the oracle shares no code with the library's rate kernels.
cx_double det_small(const cx_double* a, uword n) {
    switch (n) {
        case 1:
            return a[0];
        case 2:
            return a[0] * a[3] - a[1] * a[2];
        case 3:
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                   a[2] * (a[3] * a[7] - a[4] * a[6]);
        default: {
            cx_double acc(0.0, 0.0);
            double sign = 1.0;
            for (uword c = 0; c < 4; ++c) {
                cx_double minor[9];
                uword idx = 0;
                for (uword row = 1; row < 4; ++row)
                    for (uword col = 0; col < 4; ++col)
                        if (col != c)
                            minor[idx++] = a[4 * row + col];
                acc += sign * a[c] * det_small(minor, 3);
                sign = -sign;
            }
            return acc;
        }
    }
}

ArrayGeometry random_small_geometry(Rng& rng) {
    auto pick = [&](uword lo, uword hi) {
        return lo + static_cast<uword>(rng.uniform() * static_cast<double>(hi - lo + 1)) % (hi - lo + 1);
    };
    ArrayGeometry g;
    g.bs_v = pick(1, 2);
    g.bs_h = pick(1, 4);
    g.ue_v = pick(1, 2);
    g.ue_h = pick(1, 2);
    g.irs_v = pick(1, 4);
    g.irs_h = pick(1, 4);
    return g;
}

CheckResult check_element_phase_grid() {
    CheckResult r;
    const uword grid_points = 100000;
    const double step = 2.0 * arma::datum::pi / static_cast<double>(grid_points);
    double worst_steps = 0.0;

    for (int inst = 0; inst < 200; ++inst) {
        Rng rng(mix_seed(5150, inst));
        ArrayGeometry g = random_small_geometry(rng);
        LinkBudget budget;
        budget.uplink_power_w = budget.downlink_power_w = dbm_to_watt(rng.uniform(10.0, 40.0));
        budget.noise_w = dbm_to_watt(-89.0);
        ScenarioParams params;
        ChannelSet cs = draw_scenario(g, budget, params, rng);

        uword n_irs = cs.rank_ones.size();
        uword target = static_cast<uword>(inst) % n_irs;
        arma::cx_mat h_minus = cs.ue_bs;
        for (uword l = 0; l < n_irs; ++l)
            if (l != target)
                h_minus += std::polar(1.0, rng.uniform(0.0, 2.0 * arma::datum::pi)) *
                           cs.rank_ones[l];

        uword m = cs.ue_bs.n_cols;
        double lambda = budget.downlink_power_w /
                        (static_cast<double>(std::min(cs.ue_bs.n_rows, m)) * budget.noise_w);

        // The grid objective is det(I + lambda (H + z R)^H (H + z R)) expanded around the
        // frozen part, so each of the 1e5 points costs one small determinant.
        const arma::cx_mat& rone = cs.rank_ones[target];
        arma::cx_mat p0 = arma::cx_mat(m, m, arma::fill::eye) +
                          lambda * (h_minus.t() * h_minus + rone.t() * rone);
        arma::cx_mat q = lambda * (h_minus.t() * rone);
        std::array<cx_double, 16> pb{}, qb{}, qcb{}, gb{};
        for (uword row = 0; row < m; ++row)
            for (uword col = 0; col < m; ++col) {
                pb[m * row + col] = p0(row, col);
                qb[m * row + col] = q(row, col);
                qcb[m * row + col] = std::conj(q(col, row));
            }

        double best_val = -1.0;
        uword best_idx = 0;
        for (uword i = 0; i < grid_points; ++i) {
            cx_double z = std::polar(1.0, static_cast<double>(i) * step);
            cx_double zc = std::conj(z);
            for (uword e = 0; e < m * m; ++e)
                gb[e] = pb[e] + z * qb[e] + zc * qcb[e];
            double val = det_small(gb.data(), m).real();
            if (val > best_val) {
                best_val = val;
                best_idx = i;
            }
        }

        ElementPhase closed = optimal_phase_element(rone, h_minus, lambda);
        if (closed.degenerate)
            continue;
        double dist = ts::circular_distance(closed.phase, static_cast<double>(best_idx) * step);
        worst_steps = std::max(worst_steps, dist / step);
    }

    r.ok = worst_steps <= 1.0 + 1e-9;
    r.detail = fmt("worst distance %.3f grid steps over 200 instances", worst_steps);
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 4: coordinate ascent never decreases the rate
// ------------------------------------------------------------------------------------------------

CheckResult check_monotone_ascent() {
    CheckResult r;
    double worst_drop = 0.0;

    for (int inst = 0; inst < 50; ++inst) {
        Rng rng(mix_seed(6007, inst));
        ArrayGeometry g = random_small_geometry(rng);
        LinkBudget budget;
        budget.uplink_power_w = budget.downlink_power_w = dbm_to_watt(rng.uniform(10.0, 40.0));
        budget.noise_w = dbm_to_watt(-89.0);
        ScenarioParams params;
        ChannelSet cs = draw_scenario(g, budget, params, rng);

        DesignConfig cfg;
        cfg.max_sweeps = 20;
        cfg.stop_threshold = 1e-18;  // keep refining so all 20 sweeps land in the trace
        cfg.rank_policy = RankPolicy::fixed;
        std::vector<double> trace;
        design_phases(cs.ue_bs, cs.rank_ones, budget, cfg, &trace);

        if (trace.empty()) {
            r.ok = false;
            r.detail = fmt("instance %d produced an empty ascent trace", inst);
            return r;
        }
        for (std::size_t i = 1; i < trace.size(); ++i)
            worst_drop = std::max(worst_drop, trace[i - 1] - trace[i]);
    }

    r.ok = worst_drop <= 1e-9;
    r.detail = fmt("largest per-update drop %.2e bits over 50 instances", worst_drop);
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 5: iterative design tracks exhaustive search on a small surface
// ------------------------------------------------------------------------------------------------

CheckResult check_exhaustive_proximity() {
    CheckResult r;
    ArrayGeometry g{2, 2, 1, 2, 3, 3};
    const double powers[] = {20.0, 30.0, 40.0};
    std::string ratios;

    for (int p = 0; p < 3; ++p) {
        LinkBudget budget;
        budget.uplink_power_w = budget.downlink_power_w = dbm_to_watt(powers[p]);
        budget.noise_w = dbm_to_watt(-89.0);
        double lambda = budget.downlink_power_w / (2.0 * budget.noise_w);

        double mean_alg = 0.0, mean_exh = 0.0;
        for (int t = 0; t < 100; ++t) {
            Rng rng(mix_seed(7300, p * 1000 + t));
            ScenarioParams params;
            ChannelSet cs = draw_scenario(g, budget, params, rng);

            SearchResult best = exhaustive_search(cs.ue_bs, cs.rank_ones, budget, 2);
            mean_exh += best.se;

            DesignConfig cfg;
            cfg.quant_bits = 2;
            cfg.rank_policy = RankPolicy::fixed;
            DesignResult designed = design_phases(cs.ue_bs, cs.rank_ones, budget, cfg);
            arma::cx_mat h = total_channel(cs.ue_bs, cs.rank_ones, designed.phases);
            mean_alg += uplink_spectral_efficiency(h, lambda);
        }
        mean_alg /= 100.0;
        mean_exh /= 100.0;
        ratios += fmt(" %.0fdBm %.4f", powers[p], mean_alg / mean_exh);
        if (std::abs(mean_alg - mean_exh) > 0.02 * mean_exh)
            r.ok = false;
    }

    r.detail = "mean iterative/exhaustive ratio:" + ratios;
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 6: the rate expressions agree across their algebraic forms
// ------------------------------------------------------------------------------------------------

CheckResult check_rate_equivalences() {
    CheckResult r;
    Rng rng(8116);
    double worst_bf = 0.0, worst_dir = 0.0;

    for (int t = 0; t < 500; ++t) {
        uword n = 1 + static_cast<uword>(rng.uniform() * 8.0) % 8;
        uword m = 1 + static_cast<uword>(rng.uniform() * 8.0) % 8;
        double scale = std::pow(10.0, rng.uniform(-4.0, 0.0));
        arma::cx_mat h = scale * rng.complex_gaussian_matrix(n, m);
        // Keep lambda * ||h||^2 at or below ~1e6. Past that, rank-deficient Grams pick up
        // lambda-amplified rounding in their unit eigenvalues and the absolute tolerance
        // stops measuring the algebra.
        double lambda = std::pow(10.0, rng.uniform(-2.0, 4.5)) / (scale * scale);

        BeamformerResult bf = transmit_beamformer(h, RankPolicy::fixed);
        double beamformed = spectral_efficiency(h, bf.transmit, lambda);
        double unbeamformed = uplink_spectral_efficiency(h, lambda);
        double reversed = uplink_spectral_efficiency(h.t(), lambda);

        worst_bf = std::max(worst_bf, std::abs(beamformed - unbeamformed));
        worst_dir = std::max(worst_dir, std::abs(unbeamformed - reversed));
    }

    r.ok = worst_bf <= 1e-9 && worst_dir <= 1e-9;
    r.detail = fmt("worst gap beamformed %.1e, direction-swapped %.1e", worst_bf, worst_dir);
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 7: estimator quality ordering on the two reference scenarios
// ------------------------------------------------------------------------------------------------

double mean_eff(const SweepTable& table, double axis, Estimator which) {
    for (const SweepRow& row : table.rows)
        if (row.axis_value == axis && row.estimator == which)
            return row.mean_se_eff;
    throw std::runtime_error("mean_eff: row not found");
}

CheckResult check_scheme_ordering() {
    CheckResult r;

    // Small surface, coarse phases: the structured estimator is expected to hold a small
    // edge over the schedule-based one at equal training length.
    ScenarioConfig small = preset_config("small");
    small.trials = 200;
    small.power_dbm = {0.0, 10.0, 20.0, 30.0, 40.0};
    small.estimators = {Estimator::spac, Estimator::serom};
    SweepTable ts_small = run_sweep(small);

    bool small_ok = true;
    std::string small_series;
    for (double p : small.power_dbm) {
        double spac = mean_eff(ts_small, p, Estimator::spac);
        double serom = mean_eff(ts_small, p, Estimator::serom);
        if (spac < serom - 1e-12)
            small_ok = false;
        small_series += fmt(" %.0f:%.3f/%.3f", p, spac, serom);
    }

    // Large surface, finer phases, single power point: the schedule-based estimator wins
    // and the element-by-element scheme pays for its very long training block.
    ScenarioConfig large = preset_config("large");
    large.trials = 200;
    large.power_dbm = {30.0};
    large.estimators = {Estimator::obo, Estimator::spac, Estimator::serom};
    SweepTable ts_large = run_sweep(large);

    double obo = mean_eff(ts_large, 30.0, Estimator::obo);
    double spac = mean_eff(ts_large, 30.0, Estimator::spac);
    double serom = mean_eff(ts_large, 30.0, Estimator::serom);
    bool large_ok = serom > spac && spac > obo && serom > obo;

    r.ok = small_ok && large_ok;
    r.detail = fmt("small spac/serom by dBm:%s %s; large obo %.2f spac %.2f serom %.2f %s",
                   small_series.c_str(), small_ok ? "(ok)" : "(ordering violated)", obo, spac,
                   serom, large_ok ? "(ok)" : "(ordering violated)");
    return r;
}

// ------------------------------------------------------------------------------------------------
// check 8: full sweeps are byte-deterministic
// ------------------------------------------------------------------------------------------------

CheckResult check_determinism() {
    CheckResult r;
    ScenarioConfig cfg = preset_config("small");
    std::string first = render_csv(run_sweep(cfg));
    std::string second = render_csv(run_sweep(cfg));
    r.ok = first == second;
    r.detail = r.ok ? fmt("two full small-preset runs, %zu identical bytes", first.size())
                    : "CSV outputs differ between identical runs";
    return r;
}

}  // namespace

int main() {
    struct Check {
        const char* label;
        double budget_seconds;
        CheckResult (*fn)();
    };
    const Check checks[] = {
        {"1 training-length golden values", 1.0, check_training_lengths},
        {"2 noiseless training exactness", 30.0, check_noiseless_exactness},
        {"3 element phase vs dense grid", 60.0, check_element_phase_grid},
        {"4 monotone coordinate ascent", 60.0, check_monotone_ascent},
        {"5 iterative vs exhaustive design", 600.0, check_exhaustive_proximity},
        {"6 rate-form equivalences", 10.0, check_rate_equivalences},
        {"7 scheme ordering on reference scenarios", 1200.0, check_scheme_ordering},
        {"8 byte-deterministic sweeps", 300.0, check_determinism},
    };

    int failed = 0;
    for (const Check& c : checks) {
        auto t0 = std::chrono::steady_clock::now();
        CheckResult res;
        try {
            res = c.fn();
        } catch (const std::exception& e) {
            res.ok = false;
            res.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget_seconds) {
            res.ok = false;
            res.detail += fmt(" [over %.0f s budget]", c.budget_seconds);
        }
        if (!res.ok)
            ++failed;
        std::printf("[%s] %s: %s (%.1f s)\n", res.ok ? "PASS" : "FAIL", c.label,
                    res.detail.c_str(), secs);
        std::fflush(stdout);
    }

    std::printf("%d of %zu checks passed\n", static_cast<int>(std::size(checks)) - failed,
                std::size(checks));
    return failed;
}
