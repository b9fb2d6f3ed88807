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

#include <armadillo>
#include <vector>

#include "irsmimo/common.hpp"

namespace irsmimo {

// ------------------------------------------------------------------------------------------------
// Geometry and link-budget records
// ------------------------------------------------------------------------------------------------

// Uniform planar array sizes for the three terminals. Element (v, h) of a panel maps to
// flat index v * cols + h (row-major), which is the ordering every response vector and
// every reflecting-element index in this library uses.
struct ArrayGeometry {
    uword bs_v = 1, bs_h = 1;    // base station panel
    uword ue_v = 1, ue_h = 1;    // user terminal panel
    uword irs_v = 1, irs_h = 1;  // reflecting surface panel

    uword bs() const { return bs_v * bs_h; }
    uword ue() const { return ue_v * ue_h; }
    uword irs() const { return irs_v * irs_h; }
};

struct PanelDims {
    uword v = 1;
    uword h = 1;
    uword count() const { return v * h; }
};

// Transmit powers and propagation reference values, all in linear units (watts, meters).
struct LinkBudget {
    double uplink_power_w = 1.0;
    double downlink_power_w = 1.0;
    double noise_w = 1e-12;
    double ref_path_loss = 1e-3;  // power gain at the reference distance
    double ref_distance_m = 1.0;
};

// Fading statistics for one link. k_factor is linear (not dB); nlos_paths may be zero for
// a line-of-sight-only link.
struct RicianLinkParams {
    double k_factor = 1.0;
    uword nlos_paths = 4;
    double path_loss_exponent = 2.0;
    double distance_m = 10.0;
};

// Spatial frequencies of one propagation path: nu is the vertical frequency pi*sin(theta),
// xi the horizontal frequency pi*sin(psi)*cos(theta), at receiver and transmitter.
struct PathAngles {
    double nu_rx = 0.0, xi_rx = 0.0;
    double nu_tx = 0.0, xi_tx = 0.0;
};

// Reflecting-surface configuration: per-element on/off magnitude and phase shift.
// quant_bits records the phase resolution the entries were drawn from (0 = continuous).
struct PhaseConfig {
    arma::vec magnitudes;  // entries must be exactly 0 or 1
    arma::vec phases;      // radians, nominally in [0, 2*pi)
    unsigned quant_bits = 0;

    static PhaseConfig all_on(uword n_elements);  // magnitudes 1, phases 0
};

// One drawn realization of the three physical links plus everything derived from them.
struct ChannelSet {
    arma::cx_mat ue_bs;   // direct link, bs() x ue()
    arma::cx_mat irs_bs;  // surface to base station, bs() x irs()
    arma::cx_mat ue_irs;  // user to surface, irs() x ue()

    // rank_ones[l] = column l of irs_bs times row l of ue_irs; the cascaded channel for a
    // given PhaseConfig is the magnitude/phase-weighted sum of these.
    std::vector<arma::cx_mat> rank_ones;

    ArrayGeometry geometry;
    LinkBudget budget;

    // Line-of-sight ground truth per link, kept for diagnostics and closed-form checks.
    PathAngles los_ue_bs, los_irs_bs, los_ue_irs;

    // Drawn terminal separations in meters.
    double dist_ue_bs = 0.0, dist_irs_bs = 0.0, dist_ue_irs = 0.0;
};

// Per-link scenario statistics; defaults reproduce the evaluation setup used throughout
// the harness presets.
struct ScenarioParams {
    double k_ue_bs_db = 3.0, k_irs_bs_db = 5.0, k_ue_irs_db = 5.0;
    uword paths_ue_bs = 7, paths_irs_bs = 4, paths_ue_irs = 4;
    double exp_ue_bs = 4.5, exp_irs_bs = 2.5, exp_ue_irs = 2.2;
    double ue_irs_dist_min = 5.0, ue_irs_dist_max = 10.0;
    double irs_bs_dist_min = 90.0, irs_bs_dist_max = 100.0;
};

// ------------------------------------------------------------------------------------------------
// Operations
// ------------------------------------------------------------------------------------------------

// Unit-norm planar-array response: the Kronecker product of a vertical ramp exp(i*k*nu),
// k = 0..dims.v-1, with a horizontal ramp exp(i*k*xi), scaled by 1/sqrt(element count).
arma::cx_vec upa_response(double nu, double xi, PanelDims dims);

// Distance-dependent power gain: ref_path_loss * (distance / ref_distance)^(-exponent).
double path_loss(double distance_m, double exponent, const LinkBudget& budget);

struct RicianDraw {
    arma::cx_mat matrix;  // rx.count() x tx.count()
    PathAngles los;
};

// Draws one Rician-faded link: a line-of-sight path weighted by sqrt(k/(1+k)) plus
// nlos_paths scattered paths, all with standard complex Gaussian gains and angles drawn
// uniformly (elevation on [-pi/3, pi/3], azimuth on [-pi/2, pi/2]). Draw order is fixed
// (line-of-sight angles, its gain, then per-path angles and gain) so a given stream state
// always produces the same link.
RicianDraw draw_rician(const RicianLinkParams& params, PanelDims tx, PanelDims rx,
                       const LinkBudget& budget, Rng& rng);

// Splits the two surface links into per-element rank-one products.
std::vector<arma::cx_mat> decompose_rank_ones(const arma::cx_mat& irs_bs,
                                              const arma::cx_mat& ue_irs);

// Direct link plus the phase-weighted sum of the rank-one terms.
arma::cx_mat total_channel(const arma::cx_mat& ue_bs,
                           const std::vector<arma::cx_mat>& rank_ones,
                           const PhaseConfig& phase);

// Draws a complete scenario: distances from the passed stream, then the three links from
// substreams 0 (direct), 1 (surface-to-BS), 2 (user-to-surface) of that stream's seed.
// The direct-link distance is drawn uniformly between |d_ib - d_ui| bounds around the
// surface placement.
ChannelSet draw_scenario(const ArrayGeometry& geometry, const LinkBudget& budget,
                         const ScenarioParams& params, Rng& rng);
ChannelSet draw_scenario(const ArrayGeometry& geometry, const LinkBudget& budget, Rng& rng);

}  // namespace irsmimo
