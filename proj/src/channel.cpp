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

#include "irsmimo/channel.hpp"

#include <cmath>

#include "irsmimo/numerics.hpp"

namespace irsmimo {

PhaseConfig PhaseConfig::all_on(uword n_elements) {
    PhaseConfig p;
    p.magnitudes = arma::vec(n_elements, arma::fill::ones);
    p.phases = arma::vec(n_elements, arma::fill::zeros);
    return p;
}

arma::cx_vec upa_response(double nu, double xi, PanelDims dims) {
    if (dims.v == 0 || dims.h == 0)
        throw InvalidInputError("upa_response: panel dimensions must be at least 1");
    if (!std::isfinite(nu) || !std::isfinite(xi))
        throw InvalidInputError("upa_response: spatial frequencies must be finite");

    arma::cx_vec vert(dims.v), horz(dims.h);
    for (uword k = 0; k < dims.v; ++k)
        vert(k) = std::polar(1.0, static_cast<double>(k) * nu);
    for (uword k = 0; k < dims.h; ++k)
        horz(k) = std::polar(1.0, static_cast<double>(k) * xi);

    return arma::kron(vert, horz) / std::sqrt(static_cast<double>(dims.count()));
}

double path_loss(double distance_m, double exponent, const LinkBudget& budget) {
    if (!(distance_m > 0.0))
        throw InvalidInputError("path_loss: distance must be positive");
    if (!(exponent > 0.0))
        throw InvalidInputError("path_loss: exponent must be positive");
    return budget.ref_path_loss * std::pow(distance_m / budget.ref_distance_m, -exponent);
}

namespace {

// Elevation limited to [-pi/3, pi/3], azimuth to [-pi/2, pi/2]; the elevation bound keeps
// the vertical spatial frequency strictly inside (-pi, pi) so phase ramps never wrap.
void draw_path_pair(Rng& rng, double& nu, double& xi) {
    double elev = rng.uniform(-arma::datum::pi / 3.0, arma::datum::pi / 3.0);
    double azim = rng.uniform(-arma::datum::pi / 2.0, arma::datum::pi / 2.0);
    nu = arma::datum::pi * std::sin(elev);
    xi = arma::datum::pi * std::sin(azim) * std::cos(elev);
}

}  // namespace

RicianDraw draw_rician(const RicianLinkParams& params, PanelDims tx, PanelDims rx,
                       const LinkBudget& budget, Rng& rng) {
    if (tx.count() == 0 || rx.count() == 0)
        throw InvalidInputError("draw_rician: panel dimensions must be at least 1");
    if (!(params.k_factor >= 0.0))
        throw InvalidInputError("draw_rician: k_factor must be non-negative");

    double gain = path_loss(params.distance_m, params.path_loss_exponent, budget);
    double dim_scale = std::sqrt(static_cast<double>(rx.count()) * static_cast<double>(tx.count()) /
                                 (1.0 + params.k_factor));

    RicianDraw out;
    draw_path_pair(rng, out.los.nu_rx, out.los.xi_rx);
    draw_path_pair(rng, out.los.nu_tx, out.los.xi_tx);
    cx_double los_gain = rng.complex_gaussian();

    out.matrix = std::sqrt(params.k_factor) * los_gain *
                 upa_response(out.los.nu_rx, out.los.xi_rx, rx) *
                 upa_response(out.los.nu_tx, out.los.xi_tx, tx).t();

    if (params.nlos_paths > 0) {
        arma::cx_mat scatter(rx.count(), tx.count(), arma::fill::zeros);
        for (uword g = 0; g < params.nlos_paths; ++g) {
            PathAngles p;
            draw_path_pair(rng, p.nu_rx, p.xi_rx);
            draw_path_pair(rng, p.nu_tx, p.xi_tx);
            cx_double path_gain = rng.complex_gaussian();
            scatter += path_gain * upa_response(p.nu_rx, p.xi_rx, rx) *
                       upa_response(p.nu_tx, p.xi_tx, tx).t();
        }
        out.matrix += scatter / std::sqrt(static_cast<double>(params.nlos_paths));
    }

    out.matrix *= std::sqrt(gain) * dim_scale;
    return out;
}

std::vector<arma::cx_mat> decompose_rank_ones(const arma::cx_mat& irs_bs,
                                              const arma::cx_mat& ue_irs) {
    require_finite(irs_bs, "decompose_rank_ones");
    require_finite(ue_irs, "decompose_rank_ones");
    if (irs_bs.n_cols != ue_irs.n_rows)
        throw InvalidInputError("decompose_rank_ones: element counts of the two links disagree");

    std::vector<arma::cx_mat> out;
    out.reserve(irs_bs.n_cols);
    for (uword l = 0; l < irs_bs.n_cols; ++l)
        out.push_back(irs_bs.col(l) * ue_irs.row(l));
    return out;
}

arma::cx_mat total_channel(const arma::cx_mat& ue_bs,
                           const std::vector<arma::cx_mat>& rank_ones,
                           const PhaseConfig& phase) {
    require_finite(ue_bs, "total_channel");
    if (phase.magnitudes.n_elem != rank_ones.size() || phase.phases.n_elem != rank_ones.size())
        throw InvalidInputError("total_channel: phase configuration length mismatch");
    if (!phase.phases.is_finite())
        throw InvalidInputError("total_channel: phases must be finite");

    arma::cx_mat sum = ue_bs;
    for (uword l = 0; l < rank_ones.size(); ++l) {
        double mag = phase.magnitudes(l);
        if (mag != 0.0 && mag != 1.0)
            throw InvalidInputError("total_channel: element magnitudes must be 0 or 1");
        if (rank_ones[l].n_rows != ue_bs.n_rows || rank_ones[l].n_cols != ue_bs.n_cols)
            throw InvalidInputError("total_channel: rank-one term dimension mismatch");
        if (mag != 0.0)
            sum += std::polar(1.0, phase.phases(l)) * rank_ones[l];
    }
    return sum;
}

ChannelSet draw_scenario(const ArrayGeometry& geometry, const LinkBudget& budget,
                         const ScenarioParams& params, Rng& rng) {
    if (geometry.bs() == 0 || geometry.ue() == 0 || geometry.irs() == 0)
        throw InvalidInputError("draw_scenario: all panel dimensions must be at least 1");

    double d_ue_irs = rng.uniform(params.ue_irs_dist_min, params.ue_irs_dist_max);
    double d_irs_bs = rng.uniform(params.irs_bs_dist_min, params.irs_bs_dist_max);
    double d_ue_bs = rng.uniform(d_irs_bs - d_ue_irs, d_irs_bs + d_ue_irs);

    PanelDims bs{geometry.bs_v, geometry.bs_h};
    PanelDims ue{geometry.ue_v, geometry.ue_h};
    PanelDims irs{geometry.irs_v, geometry.irs_h};

    RicianLinkParams ue_bs_link{db_to_linear(params.k_ue_bs_db), params.paths_ue_bs,
                                params.exp_ue_bs, d_ue_bs};
    RicianLinkParams irs_bs_link{db_to_linear(params.k_irs_bs_db), params.paths_irs_bs,
                                 params.exp_irs_bs, d_irs_bs};
    RicianLinkParams ue_irs_link{db_to_linear(params.k_ue_irs_db), params.paths_ue_irs,
                                 params.exp_ue_irs, d_ue_irs};

    Rng s0 = rng.substream(0), s1 = rng.substream(1), s2 = rng.substream(2);
    RicianDraw direct = draw_rician(ue_bs_link, ue, bs, budget, s0);
    RicianDraw surface_bs = draw_rician(irs_bs_link, irs, bs, budget, s1);
    RicianDraw ue_surface = draw_rician(ue_irs_link, ue, irs, budget, s2);

    ChannelSet set;
    set.ue_bs = direct.matrix;
    set.irs_bs = surface_bs.matrix;
    set.ue_irs = ue_surface.matrix;
    set.rank_ones = decompose_rank_ones(set.irs_bs, set.ue_irs);
    set.geometry = geometry;
    set.budget = budget;
    set.los_ue_bs = direct.los;
    set.los_irs_bs = surface_bs.los;
    set.los_ue_irs = ue_surface.los;
    set.dist_ue_bs = d_ue_bs;
    set.dist_irs_bs = d_irs_bs;
    set.dist_ue_irs = d_ue_irs;
    return set;
}

ChannelSet draw_scenario(const ArrayGeometry& geometry, const LinkBudget& budget, Rng& rng) {
    return draw_scenario(geometry, budget, ScenarioParams{}, rng);
}

}  // namespace irsmimo
