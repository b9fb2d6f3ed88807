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
// Training-based estimators for the per-element cascaded channels. All of them share the
// same two-stage shape: the direct link is estimated once with the surface switched off,
// then a cascade stage drives the surface through a schedule of phase patterns and works
// the per-element rank-one matrices out of the direct-cancelled observations. They differ
// only in the schedule, which is what sets their training overhead:
//
//   obo     one element on at a time, a full pilot block per element
//   coobo   one uplink plus one downlink slot per element, coupled through a projection
//   spac    pilot blocks only for the first surface row and column, then angle averaging
//           extrapolates the remaining elements
//   serom   all elements on with shifted phase rows, then a pseudo-inverse style unstack
//
// The all-zero baseline skips per-element estimation entirely and just measures the
// combined channel with every element reflecting at phase zero.

#pragma once

#include <armadillo>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "irsmimo/channel.hpp"
#include "irsmimo/common.hpp"

namespace irsmimo {

// ------------------------------------------------------------------------------------------------
// Result records
// ------------------------------------------------------------------------------------------------

// Direct-link estimate plus the exact noise realization that produced it. Keeping the
// noise lets later stages (and tests) reconstruct the estimation error without re-running
// the pilot block.
struct DirectEstimate {
    arma::cx_mat estimate;             // bs() x ue()
    arma::cx_mat noise;                // raw additive noise per pilot slot, bs() x slots
    arma::cx_mat training_beamformers; // pilot beamformer per slot, ue() x slots
    uword slots = 0;
};

// Output shared by the cascade estimators: the direct estimate they were given, one
// rank-one estimate per surface element, and the slot accounting.
struct RankOneSet {
    arma::cx_mat direct_estimate;
    std::vector<arma::cx_mat> rank_one_estimates;
    uword direct_slots = 0;
    uword cascade_slots = 0;
    std::string method;
};

// Raw per-element noise draws from the coupled two-slot estimator, for error analysis.
struct CoOboDiagnostics {
    std::vector<arma::cx_vec> uplink_noise;    // bs()-long per element
    std::vector<arma::cx_vec> downlink_noise;  // ue()-long per element
};

// Intermediate quantities of the structured estimator: averaged spatial frequencies at
// each terminal, the effective surface frequency pair, the common cascade gain, and the
// per-element scalar observations it was fitted to.
struct SpacEstimate {
    double bs_nu = 0.0, bs_xi = 0.0;
    double ue_nu = 0.0, ue_xi = 0.0;
    double irs_nu = 0.0, irs_xi = 0.0;
    cx_double cascade_gain{0.0, 0.0};
    std::vector<cx_double> scalar_observations;
};

// Phase schedule for the stacked multi-period estimator. training_matrix has one row per
// period and one column per element; every entry is unit modulus. normalization is the
// scale that undoes the schedule's Gramian when the periods are unstacked.
struct SeromPlan {
    uword periods = 0;
    arma::cx_mat training_matrix;
    double normalization = 1.0;
};

struct TotalChannelEstimate {
    arma::cx_mat estimate;
    uword slots = 0;
};

// Total training lengths (direct stage included where one is needed).
struct TrainingLengths {
    uword direct = 0;
    uword all_zero = 0;
    uword coobo = 0;
    uword spac = 0;
    uword serom = 0;
    uword obo = 0;
};

// ------------------------------------------------------------------------------------------------
// Operations
// ------------------------------------------------------------------------------------------------

// Received pilot vectors y_t = sqrt(power) * H(t) * f_t + n_t for one block. channel_at
// is called once per slot with the slot index; beamformers must be unit norm. Noise is
// complex Gaussian with per-entry second moment noise_w.
std::vector<arma::cx_vec> simulate_uplink_block(
    const std::function<arma::cx_mat(uword)>& channel_at,
    const std::vector<arma::cx_vec>& beamformers, double power_w, double noise_w, Rng& rng);

// Pilot-based direct-link estimate with the surface off, using one unitary DFT pilot
// block (ue() slots).
DirectEstimate estimate_direct(const ChannelSet& channels, const LinkBudget& budget, Rng& rng);

// Subtracts the estimated direct-link contribution from one received pilot vector.
arma::cx_vec cancel_direct(const arma::cx_vec& received, const arma::cx_mat& direct_estimate,
                           const arma::cx_vec& beamformer, double power_w);

// One-by-one estimation: element l alone reflects at phase zero while a full DFT pilot
// block is sent, giving an unstructured estimate of each rank-one term. irs() * ue()
// cascade slots.
RankOneSet obo_estimate(const ChannelSet& channels, const LinkBudget& budget,
                        const DirectEstimate& direct, Rng& rng);

// Coupled two-slot estimation: per element, one uplink slot and one downlink slot with
// fixed wideband beamformers; the rank-one term is the outer product of the two cleaned
// observations, normalized by a projection of the uplink one. 2 * irs() cascade slots.
// Throws DegenerateProjectionError when the projection denominator collapses. When diag
// is non-null the raw noise draws are copied out for error analysis.
RankOneSet coobo_estimate(const ChannelSet& channels, const LinkBudget& budget,
                          const DirectEstimate& direct, Rng& rng,
                          CoOboDiagnostics* diag = nullptr);

// Structured estimation for a surface with one dominant propagation path on each side:
// runs the one-by-one scheme on the first surface column and row only, averages spatial
// frequencies out of the singular vectors, fits a common gain, and reconstructs every
// untrained element in closed form. (irs_v + irs_h - 1) * ue() cascade slots. Requires
// at least a 2 x 2 surface.
std::pair<RankOneSet, SpacEstimate> spac_estimate(const ChannelSet& channels,
                                                  const LinkBudget& budget,
                                                  const DirectEstimate& direct, Rng& rng);

// Builds the phase schedule for the stacked estimator: `periods` rows drawn from the
// DFT of order max(periods, elements). With fewer periods than elements the rows are
// evenly spaced, trading orthogonality for overhead. quant_bits > 0 snaps every entry's
// phase to that resolution before the normalization factor is computed.
SeromPlan build_serom_plan(uword periods, uword elements, unsigned quant_bits);

// Stacked multi-period estimation: all elements reflect simultaneously, one pilot block
// per schedule row, and the per-element terms are unstacked with the conjugate schedule.
// periods * ue() cascade slots.
RankOneSet serom_estimate(const ChannelSet& channels, const LinkBudget& budget,
                          const SeromPlan& plan, const DirectEstimate& direct, Rng& rng);

// Baseline that never separates the surface from the direct link: one pilot block against
// the total channel with all elements at phase zero.
TotalChannelEstimate all_zero_baseline(const ChannelSet& channels, const LinkBudget& budget,
                                       Rng& rng);

// Closed-form training lengths for every scheme at the given geometry and period count.
TrainingLengths training_lengths(const ArrayGeometry& geometry, uword serom_periods);

}  // namespace irsmimo
