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

#include "irsmimo/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "irsmimo/numerics.hpp"
#include "irsmimo/phase_design.hpp"

namespace irsmimo {

namespace {

std::vector<arma::cx_vec> matrix_columns(const arma::cx_mat& m) {
    std::vector<arma::cx_vec> cols;
    cols.reserve(m.n_cols);
    for (uword c = 0; c < m.n_cols; ++c)
        cols.push_back(m.col(c));
    return cols;
}

void check_budget(const LinkBudget& budget, const char* what) {
    if (!(budget.uplink_power_w > 0.0) || !(budget.downlink_power_w > 0.0))
        throw InvalidInputError(std::string(what) + ": transmit powers must be positive");
    if (!(budget.noise_w >= 0.0) || !std::isfinite(budget.noise_w))
        throw InvalidInputError(std::string(what) + ": noise power must be finite and non-negative");
}

void check_direct(const ChannelSet& channels, const DirectEstimate& direct, const char* what) {
    if (direct.estimate.n_rows != channels.geometry.bs() ||
        direct.estimate.n_cols != channels.geometry.ue())
        throw InvalidInputError(std::string(what) + ": direct estimate does not match the geometry");
}

// Shared core of the one-by-one schemes: for each requested element index, switch that
// element alone to phase zero, send a unitary DFT pilot block, cancel the direct link,
// and invert the pilot matrix. Returns the per-element estimates in the order given.
std::vector<arma::cx_mat> one_by_one_core(const ChannelSet& channels, const LinkBudget& budget,
                                          const DirectEstimate& direct,
                                          const std::vector<uword>& indices, Rng& rng) {
    uword n_bs = channels.geometry.bs();
    uword n_ue = channels.geometry.ue();
    arma::cx_mat pilots = dft_matrix(n_ue);
    std::vector<arma::cx_vec> beams = matrix_columns(pilots);
    double power = budget.uplink_power_w;

    std::vector<arma::cx_mat> out;
    out.reserve(indices.size());
    for (uword l : indices) {
        arma::cx_mat h_eff = channels.ue_bs + channels.rank_ones[l];
        auto block = simulate_uplink_block([&](uword) { return h_eff; }, beams, power,
                                           budget.noise_w, rng);
        arma::cx_mat cleaned(n_bs, n_ue);
        for (uword t = 0; t < n_ue; ++t)
            cleaned.col(t) = cancel_direct(block[t], direct.estimate, beams[t], power);
        out.push_back(cleaned * pilots.t() / std::sqrt(power));
    }
    return out;
}

// Sum of elementwise phase steps between consecutive grid rows of a flattened panel
// vector (row-major). Always formed as the argument of a ratio, never as a difference of
// two separately computed arguments, so a constant phase offset cancels exactly.
double vertical_step_sum(const arma::cx_vec& u, uword d_v, uword d_h) {
    double acc = 0.0;
    for (uword y = 1; y < d_v; ++y)
        for (uword x = 0; x < d_h; ++x)
            acc += std::arg(u(y * d_h + x) * std::conj(u((y - 1) * d_h + x)));
    return acc;
}

double horizontal_step_sum(const arma::cx_vec& u, uword d_v, uword d_h) {
    double acc = 0.0;
    for (uword y = 0; y < d_v; ++y)
        for (uword x = 1; x < d_h; ++x)
            acc += std::arg(u(y * d_h + x) * std::conj(u(y * d_h + x - 1)));
    return acc;
}

}  // namespace

std::vector<arma::cx_vec> simulate_uplink_block(
    const std::function<arma::cx_mat(uword)>& channel_at,
    const std::vector<arma::cx_vec>& beamformers, double power_w, double noise_w, Rng& rng) {
    if (beamformers.empty())
        throw InvalidInputError("simulate_uplink_block: at least one pilot slot is required");
    if (!(power_w > 0.0))
        throw InvalidInputError("simulate_uplink_block: power must be positive");
    if (!(noise_w >= 0.0) || !std::isfinite(noise_w))
        throw InvalidInputError("simulate_uplink_block: noise power must be finite and non-negative");

    double amp = std::sqrt(power_w);
    double nsd = std::sqrt(noise_w);
    std::vector<arma::cx_vec> received;
    received.reserve(beamformers.size());
    for (uword t = 0; t < beamformers.size(); ++t) {
        const arma::cx_vec& f = beamformers[t];
        if (std::abs(arma::norm(f) - 1.0) > tol().beamformer_norm)
            throw InvalidInputError("simulate_uplink_block: pilot beamformers must be unit norm");
        arma::cx_mat h = channel_at(t);
        require_finite(h, "simulate_uplink_block");
        if (h.n_cols != f.n_elem)
            throw InvalidInputError("simulate_uplink_block: beamformer length does not match channel");
        arma::cx_vec noise = rng.complex_gaussian_vector(h.n_rows);
        received.push_back(amp * (h * f) + nsd * noise);
    }
    return received;
}

DirectEstimate estimate_direct(const ChannelSet& channels, const LinkBudget& budget, Rng& rng) {
    check_budget(budget, "estimate_direct");
    uword n_bs = channels.geometry.bs();
    uword n_ue = channels.geometry.ue();

    DirectEstimate out;
    out.training_beamformers = dft_matrix(n_ue);
    out.slots = n_ue;
    // Noise is drawn explicitly (not reconstructed from the received block) so the stored
    // realization is exact to the last bit; error-expansion checks depend on that.
    out.noise = arma::cx_mat(n_bs, n_ue);
    double nsd = std::sqrt(budget.noise_w);
    arma::cx_mat received(n_bs, n_ue);
    double amp = std::sqrt(budget.uplink_power_w);
    for (uword t = 0; t < n_ue; ++t) {
        out.noise.col(t) = nsd * rng.complex_gaussian_vector(n_bs);
        received.col(t) = amp * (channels.ue_bs * out.training_beamformers.col(t)) + out.noise.col(t);
    }
    out.estimate = received * out.training_beamformers.t() / amp;
    return out;
}

arma::cx_vec cancel_direct(const arma::cx_vec& received, const arma::cx_mat& direct_estimate,
                           const arma::cx_vec& beamformer, double power_w) {
    if (received.n_elem != direct_estimate.n_rows || beamformer.n_elem != direct_estimate.n_cols)
        throw InvalidInputError("cancel_direct: dimension mismatch");
    if (!(power_w > 0.0))
        throw InvalidInputError("cancel_direct: power must be positive");
    return received - std::sqrt(power_w) * (direct_estimate * beamformer);
}

RankOneSet obo_estimate(const ChannelSet& channels, const LinkBudget& budget,
                        const DirectEstimate& direct, Rng& rng) {
    check_budget(budget, "obo_estimate");
    check_direct(channels, direct, "obo_estimate");

    std::vector<uword> indices(channels.rank_ones.size());
    for (uword l = 0; l < indices.size(); ++l)
        indices[l] = l;

    RankOneSet out;
    out.direct_estimate = direct.estimate;
    out.rank_one_estimates = one_by_one_core(channels, budget, direct, indices, rng);
    out.direct_slots = direct.slots;
    out.cascade_slots = channels.geometry.irs() * channels.geometry.ue();
    out.method = "obo";
    return out;
}

RankOneSet coobo_estimate(const ChannelSet& channels, const LinkBudget& budget,
                          const DirectEstimate& direct, Rng& rng, CoOboDiagnostics* diag) {
    check_budget(budget, "coobo_estimate");
    check_direct(channels, direct, "coobo_estimate");

    uword n_bs = channels.geometry.bs();
    uword n_ue = channels.geometry.ue();
    uword n_irs = channels.geometry.irs();

    // Fixed wideband probes: normalized all-ones at both ends.
    arma::cx_vec f_ul(n_ue, arma::fill::value(cx_double(1.0, 0.0)));
    f_ul /= std::sqrt(static_cast<double>(n_ue));
    arma::cx_vec w_dl(n_bs, arma::fill::value(cx_double(1.0, 0.0)));
    w_dl /= std::sqrt(static_cast<double>(n_bs));

    double amp_ul = std::sqrt(budget.uplink_power_w);
    double amp_dl = std::sqrt(budget.downlink_power_w);
    double nsd = std::sqrt(budget.noise_w);

    if (diag) {
        diag->uplink_noise.clear();
        diag->downlink_noise.clear();
    }

    RankOneSet out;
    out.direct_estimate = direct.estimate;
    out.rank_one_estimates.reserve(n_irs);
    for (uword l = 0; l < n_irs; ++l) {
        arma::cx_mat h_eff = channels.ue_bs + channels.rank_ones[l];

        arma::cx_vec n_ul = nsd * rng.complex_gaussian_vector(n_bs);
        arma::cx_vec y_ul = amp_ul * (h_eff * f_ul) + n_ul;
        arma::cx_vec clean_ul = y_ul - amp_ul * (direct.estimate * f_ul);

        arma::cx_vec n_dl = nsd * rng.complex_gaussian_vector(n_ue);
        arma::cx_vec y_dl = amp_dl * (h_eff.t() * w_dl) + n_dl;
        arma::cx_vec clean_dl = y_dl - amp_dl * (direct.estimate.t() * w_dl);

        if (diag) {
            diag->uplink_noise.push_back(n_ul);
            diag->downlink_noise.push_back(n_dl);
        }

        cx_double denom = amp_dl * arma::cdot(w_dl, clean_ul);
        double floor = tol().projection_floor * amp_dl * arma::norm(clean_ul);
        if (std::abs(denom) <= floor)
            throw DegenerateProjectionError(
                "coobo_estimate: projection denominator collapsed at element " + std::to_string(l));

        out.rank_one_estimates.push_back(clean_ul * clean_dl.t() / denom);
    }
    out.direct_slots = direct.slots;
    out.cascade_slots = 2 * n_irs;
    out.method = "coobo";
    return out;
}

std::pair<RankOneSet, SpacEstimate> spac_estimate(const ChannelSet& channels,
                                                  const LinkBudget& budget,
                                                  const DirectEstimate& direct, Rng& rng) {
    check_budget(budget, "spac_estimate");
    check_direct(channels, direct, "spac_estimate");

    const ArrayGeometry& g = channels.geometry;
    if (g.irs_v < 2 || g.irs_h < 2)
        throw InvalidInputError("spac_estimate: needs at least a 2x2 surface");

    // Trained set: full first row, then the rest of the first column (ascending order).
    std::vector<uword> trained;
    for (uword h = 0; h < g.irs_h; ++h)
        trained.push_back(h);
    for (uword v = 1; v < g.irs_v; ++v)
        trained.push_back(v * g.irs_h);

    std::vector<arma::cx_mat> trained_est = one_by_one_core(channels, budget, direct, trained, rng);
    double n_trained = static_cast<double>(trained.size());

    // Average the per-antenna phase steps of the dominant singular vectors.
    double bs_v_acc = 0.0, bs_h_acc = 0.0, ue_v_acc = 0.0, ue_h_acc = 0.0;
    for (const arma::cx_mat& est : trained_est) {
        SvdResult sr = svd(est);
        if (!(sr.s(0) > 0.0))
            throw DegenerateChannelError("spac_estimate: a trained element estimate is zero");
        arma::cx_vec u = sr.u.col(0);
        arma::cx_vec v = sr.v.col(0);
        bs_v_acc += vertical_step_sum(u, g.bs_v, g.bs_h);
        bs_h_acc += horizontal_step_sum(u, g.bs_v, g.bs_h);
        ue_v_acc += vertical_step_sum(v, g.ue_v, g.ue_h);
        ue_h_acc += horizontal_step_sum(v, g.ue_v, g.ue_h);
    }

    SpacEstimate info;
    info.bs_nu = g.bs_v > 1 ? bs_v_acc / (n_trained * (g.bs_v - 1) * g.bs_h) : 0.0;
    info.bs_xi = g.bs_h > 1 ? bs_h_acc / (n_trained * (g.bs_h - 1) * g.bs_v) : 0.0;
    info.ue_nu = g.ue_v > 1 ? ue_v_acc / (n_trained * (g.ue_v - 1) * g.ue_h) : 0.0;
    info.ue_xi = g.ue_h > 1 ? ue_h_acc / (n_trained * (g.ue_h - 1) * g.ue_v) : 0.0;

    arma::cx_vec a_bs = upa_response(info.bs_nu, info.bs_xi, {g.bs_v, g.bs_h});
    arma::cx_vec a_ue = upa_response(info.ue_nu, info.ue_xi, {g.ue_v, g.ue_h});

    // Scalar observation per trained element, then surface frequencies from consecutive
    // ratios along the first row and first column.
    std::map<uword, cx_double> scalar;
    for (size_t i = 0; i < trained.size(); ++i) {
        cx_double c = arma::as_scalar(a_bs.t() * trained_est[i] * a_ue);
        scalar[trained[i]] = c;
        info.scalar_observations.push_back(c);
    }
    double nu_acc = 0.0;
    for (uword v = 1; v < g.irs_v; ++v)
        nu_acc += std::arg(scalar[v * g.irs_h] * std::conj(scalar[(v - 1) * g.irs_h]));
    info.irs_nu = nu_acc / static_cast<double>(g.irs_v - 1);
    double xi_acc = 0.0;
    for (uword h = 1; h < g.irs_h; ++h)
        xi_acc += std::arg(scalar[h] * std::conj(scalar[h - 1]));
    info.irs_xi = xi_acc / static_cast<double>(g.irs_h - 1);

    arma::cx_vec a_irs = upa_response(info.irs_nu, info.irs_xi, {g.irs_v, g.irs_h});
    double root_l = std::sqrt(static_cast<double>(g.irs()));

    cx_double gain_acc(0.0, 0.0);
    for (const auto& [l, c] : scalar)
        gain_acc += c / (a_irs(l) / root_l);
    info.cascade_gain = gain_acc / n_trained;

    // Trained elements keep their pilot-based estimates; the rest are reconstructed from
    // the fitted structure.
    RankOneSet out;
    out.direct_estimate = direct.estimate;
    out.rank_one_estimates.resize(g.irs());
    for (size_t i = 0; i < trained.size(); ++i)
        out.rank_one_estimates[trained[i]] = trained_est[i];
    arma::cx_mat dyad = a_bs * a_ue.t();
    for (uword l = 0; l < g.irs(); ++l) {
        if (!scalar.count(l))
            out.rank_one_estimates[l] = (info.cascade_gain / root_l) * a_irs(l) * dyad;
    }
    out.direct_slots = direct.slots;
    out.cascade_slots = trained.size() * g.ue();
    out.method = "spac";
    return {out, info};
}

SeromPlan build_serom_plan(uword periods, uword elements, unsigned quant_bits) {
    if (periods == 0 || elements == 0)
        throw InvalidInputError("build_serom_plan: periods and elements must be at least 1");

    uword order = std::max(periods, elements);
    SeromPlan plan;
    plan.periods = periods;
    plan.training_matrix = arma::cx_mat(periods, elements);
    for (uword k = 0; k < periods; ++k) {
        // With fewer periods than elements, spread the selected DFT rows evenly.
        uword row = (k * order) / periods;
        for (uword c = 0; c < elements; ++c) {
            double ang = -2.0 * arma::datum::pi *
                         static_cast<double>((row * c) % order) / static_cast<double>(order);
            if (quant_bits > 0)
                ang = quantize_phase(ang, quant_bits);
            plan.training_matrix(k, c) = std::polar(1.0, ang);
        }
    }

    // Undo the schedule Gramian on average: scale by elements / sum_l |row-sum of G|.
    arma::cx_mat gram = plan.training_matrix.t() * plan.training_matrix;
    double denom = 0.0;
    for (uword l = 0; l < elements; ++l)
        denom += std::abs(arma::accu(gram.row(l)));
    if (!(denom > 0.0))
        throw DegenerateProjectionError("build_serom_plan: schedule Gramian collapsed");
    plan.normalization = static_cast<double>(elements) / denom;
    return plan;
}

RankOneSet serom_estimate(const ChannelSet& channels, const LinkBudget& budget,
                          const SeromPlan& plan, const DirectEstimate& direct, Rng& rng) {
    check_budget(budget, "serom_estimate");
    check_direct(channels, direct, "serom_estimate");

    uword n_bs = channels.geometry.bs();
    uword n_ue = channels.geometry.ue();
    uword n_irs = channels.geometry.irs();
    if (plan.training_matrix.n_rows != plan.periods || plan.training_matrix.n_cols != n_irs)
        throw InvalidInputError("serom_estimate: schedule does not match the surface size");

    arma::cx_mat pilots = dft_matrix(n_ue);
    std::vector<arma::cx_vec> beams = matrix_columns(pilots);
    double power = budget.uplink_power_w;

    // One pilot block per schedule row; keep the direct-cancelled, pilot-inverted block.
    std::vector<arma::cx_mat> processed;
    processed.reserve(plan.periods);
    for (uword q = 0; q < plan.periods; ++q) {
        arma::cx_mat h_eff = channels.ue_bs;
        for (uword l = 0; l < n_irs; ++l)
            h_eff += plan.training_matrix(q, l) * channels.rank_ones[l];
        auto block = simulate_uplink_block([&](uword) { return h_eff; }, beams, power,
                                           budget.noise_w, rng);
        arma::cx_mat cleaned(n_bs, n_ue);
        for (uword t = 0; t < n_ue; ++t)
            cleaned.col(t) = cancel_direct(block[t], direct.estimate, beams[t], power);
        processed.push_back(cleaned * pilots.t());
    }

    // Unstack with the conjugated schedule and the Gramian-derived normalization.
    RankOneSet out;
    out.direct_estimate = direct.estimate;
    out.rank_one_estimates.reserve(n_irs);
    double scale = plan.normalization / std::sqrt(power);
    for (uword l = 0; l < n_irs; ++l) {
        arma::cx_mat acc(n_bs, n_ue, arma::fill::zeros);
        for (uword q = 0; q < plan.periods; ++q)
            acc += std::conj(plan.training_matrix(q, l)) * processed[q];
        out.rank_one_estimates.push_back(scale * acc);
    }
    out.direct_slots = direct.slots;
    out.cascade_slots = plan.periods * n_ue;
    out.method = "serom";
    return out;
}

TotalChannelEstimate all_zero_baseline(const ChannelSet& channels, const LinkBudget& budget,
                                       Rng& rng) {
    check_budget(budget, "all_zero_baseline");
    uword n_ue = channels.geometry.ue();
    arma::cx_mat h_tot = total_channel(channels.ue_bs, channels.rank_ones,
                                       PhaseConfig::all_on(channels.geometry.irs()));
    arma::cx_mat pilots = dft_matrix(n_ue);
    std::vector<arma::cx_vec> beams = matrix_columns(pilots);
    auto block = simulate_uplink_block([&](uword) { return h_tot; }, beams,
                                       budget.uplink_power_w, budget.noise_w, rng);
    arma::cx_mat received(channels.geometry.bs(), n_ue);
    for (uword t = 0; t < n_ue; ++t)
        received.col(t) = block[t];

    TotalChannelEstimate out;
    out.estimate = received * pilots.t() / std::sqrt(budget.uplink_power_w);
    out.slots = n_ue;
    return out;
}

TrainingLengths training_lengths(const ArrayGeometry& geometry, uword serom_periods) {
    if (geometry.bs() == 0 || geometry.ue() == 0 || geometry.irs() == 0)
        throw InvalidInputError("training_lengths: all panel dimensions must be at least 1");
    if (serom_periods == 0)
        throw InvalidInputError("training_lengths: period count must be at least 1");

    uword m = geometry.ue();
    uword l = geometry.irs();
    TrainingLengths t;
    t.direct = m;
    t.all_zero = m;
    t.coobo = m + 2 * l;
    t.spac = m + (geometry.irs_v + geometry.irs_h - 1) * m;
    t.serom = m + serom_periods * m;
    t.obo = m + l * m;
    return t;
}

}  // namespace irsmimo
