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

// Reflection phase-shift design and spectral-efficiency evaluation.
//
// The surface phases are chosen by cyclic coordinate ascent: with every other element
// frozen, the optimizer for a single element's phase has a closed form, so one sweep
// updates each element once and sweeps repeat until the phases settle. A brute-force
// search over quantized phase words is provided as a small-problem reference, together
// with closed-form operation counts for comparing the approaches on paper.

#include <cstdint>
#include <vector>

#include <armadillo>

#include "irsmimo/channel.hpp"
#include "irsmimo/common.hpp"

namespace irsmimo {

// How the stream count (and with it the per-stream power split) is chosen.
enum class RankPolicy {
    fixed,      // always min(bs antennas, ue antennas)
    numerical,  // singular values above tol().rank_threshold times the largest
};

struct DesignConfig {
    uword max_sweeps = 20;        // refinement sweeps after the warm-up pass
    double stop_threshold = 0.0;  // sum of per-element phase moves; 0 picks 1e-3 per element
    unsigned quant_bits = 0;      // 0 keeps continuous phases, B > 0 rounds after convergence
    RankPolicy rank_policy = RankPolicy::numerical;
};

struct DesignResult {
    PhaseConfig phases;
    double lambda = 0.0;  // per-stream transmit power over noise, set once up front
    uword rank = 0;       // stream count the power split assumed
    uword sweeps = 0;     // refinement sweeps actually run (warm-up pass not counted)
    bool converged = false;
    std::vector<uword> degenerate_elements;  // elements whose update had no preferred phase
};

// Closed-form best phase for one element while the rest of the link is frozen.
struct ElementPhase {
    double phase = 0.0;      // in [0, 2*pi)
    bool degenerate = false;  // the objective was flat; phase reported as 0
};

struct SearchResult {
    PhaseConfig phases;
    double se = 0.0;
    std::uint64_t evaluations = 0;
};

struct BeamformerResult {
    arma::cx_mat transmit;  // orthonormal columns on the base-station side
    arma::cx_mat receive;   // matching columns on the user side
    uword rank = 0;
};

// Per-use and overhead-discounted rates of a designed link, evaluated on the true channel.
struct SEReport {
    double per_use = 0.0;
    double effective = 0.0;
    uword training_slots = 0;
    uword coherence_length = 0;
};

// Operation-count models for the design approaches.
enum class PhaseTechnique {
    reference_manifold,  // warm-started manifold optimizer used as the literature baseline
    proposed_iterative,  // the closed-form coordinate ascent implemented here
    exhaustive_search,   // quantized brute force
};

struct ComplexityParams {
    uword bs = 0;
    uword ue = 0;
    uword irs = 0;
    std::uint64_t outer_iterations = 0;  // refinement iterations (both iterative techniques)
    std::uint64_t init_iterations = 0;   // warm-up iterations (reference technique only)
    unsigned quant_bits = 0;             // exhaustive search only
};

// Downlink rate of `channel` (bs rows, ue columns) with transmit precoder `precoder`
// applied on the base-station side and per-stream power-to-noise ratio `lambda`.
double spectral_efficiency(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                           double lambda);

// Same rate computed from the explicit Gram determinant without a precoder; equals the
// unbeamformed capacity route and serves as an independently computed cross-check.
double uplink_spectral_efficiency(const arma::cx_mat& channel, double lambda);

// Top singular subspace of the channel. The transmit side holds the left singular
// vectors, the receive side the right ones. Throws DegenerateChannelError when the
// numerical policy meets an all-zero channel.
BeamformerResult transmit_beamformer(const arma::cx_mat& channel, RankPolicy policy);

// Phase that maximizes the rate of rest + e^{j phase} * rank_one at power ratio lambda.
// The flat-objective case (for example rest orthogonal to the element) is flagged
// instead of returning an arbitrary angle.
ElementPhase optimal_phase_element(const arma::cx_mat& rank_one, const arma::cx_mat& rest,
                                   double lambda);

// Nearest representable angle on the 2^bits-point phase wheel, returned in [0, 2*pi).
double quantize_phase(double phase, unsigned bits);

// Full coordinate-ascent design: one incremental warm-up pass over the elements, then up
// to config.max_sweeps refinement sweeps. The power ratio is fixed once from the channel
// with every element at phase zero. When ascent_trace is given, the rate after the
// warm-up pass and after every element update is appended; it is non-decreasing.
DesignResult design_phases(const arma::cx_mat& direct, const std::vector<arma::cx_mat>& rank_ones,
                           const LinkBudget& budget, const DesignConfig& config,
                           std::vector<double>* ascent_trace = nullptr);

// Brute force over all 2^(bits * elements) quantized phase words, first maximizer wins.
// Refuses (SearchBudgetError) when the word count exceeds max_evaluations.
SearchResult exhaustive_search(const arma::cx_mat& direct,
                               const std::vector<arma::cx_mat>& rank_ones,
                               const LinkBudget& budget, unsigned quant_bits,
                               std::uint64_t max_evaluations = std::uint64_t(1) << 20);

// Rates of the true link under a designed phase configuration and precoder, discounted
// by the share of the coherence block spent on training.
SEReport effective_spectral_efficiency(const ChannelSet& truth, const PhaseConfig& phases,
                                       const arma::cx_mat& precoder, uword rank,
                                       const LinkBudget& budget, uword coherence_length,
                                       uword training_slots);

// Closed-form floating-point operation counts; throws std::overflow_error when the count
// does not fit in 64 bits.
std::uint64_t complexity_estimate(PhaseTechnique technique, const ComplexityParams& params);

}  // namespace irsmimo
