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

#include "irsmimo/phase_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "irsmimo/numerics.hpp"

namespace irsmimo {

namespace {

const double two_pi = 2.0 * arma::datum::pi;

double wrap_to_positive(double angle) {
    double w = std::fmod(angle, two_pi);
    if (w < 0.0)
        w += two_pi;
    return w;
}

double circular_distance(double a, double b) {
    double d = std::abs(wrap_to_positive(a) - wrap_to_positive(b));
    return std::min(d, two_pi - d);
}

void check_design_inputs(const arma::cx_mat& direct, const std::vector<arma::cx_mat>& rank_ones,
                         const LinkBudget& budget, const char* what) {
    require_finite(direct, what);
    if (rank_ones.empty())
        throw InvalidInputError(std::string(what) + ": at least one surface element is required");
    for (const auto& r : rank_ones) {
        require_finite(r, what);
        if (r.n_rows != direct.n_rows || r.n_cols != direct.n_cols)
            throw InvalidInputError(std::string(what) +
                                    ": element contribution does not match the direct link");
    }
    if (!(budget.downlink_power_w > 0.0))
        throw InvalidInputError(std::string(what) + ": downlink power must be positive");
    if (!(budget.noise_w > 0.0))
        throw InvalidInputError(std::string(what) + ": noise power must be positive");
}

uword effective_rank(const arma::cx_mat& channel, RankPolicy policy, const char* what) {
    uword full = std::min(channel.n_rows, channel.n_cols);
    if (policy == RankPolicy::fixed)
        return full;
    SvdResult dec = svd(channel);
    if (!(dec.s(0) > 0.0))
        throw DegenerateChannelError(std::string(what) + ": channel is numerically zero");
    uword r = 0;
    for (uword i = 0; i < dec.s.n_elem; ++i)
        if (dec.s(i) > tol().rank_threshold * dec.s(0))
            ++r;
    return r;
}

// Saturating multiply-accumulate helpers over __int128 so the published operation-count
// formulas can be evaluated without silent wraparound.
unsigned __int128 checked_shift(unsigned exponent) {
    if (exponent >= 127)
        throw std::overflow_error("complexity_estimate: phase word space exceeds 64-bit range");
    return static_cast<unsigned __int128>(1) << exponent;
}

std::uint64_t narrow_count(unsigned __int128 value) {
    if (value > static_cast<unsigned __int128>(std::numeric_limits<std::uint64_t>::max()))
        throw std::overflow_error("complexity_estimate: count exceeds 64-bit range");
    return static_cast<std::uint64_t>(value);
}

}  // namespace

double spectral_efficiency(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                           double lambda) {
    require_finite(channel, "spectral_efficiency");
    require_finite(precoder, "spectral_efficiency");
    if (precoder.n_rows != channel.n_rows || precoder.n_cols == 0)
        throw InvalidInputError("spectral_efficiency: precoder does not match the channel");
    arma::cx_mat effective = channel.t() * precoder;
    return capacity_log_det(effective, lambda);
}

double uplink_spectral_efficiency(const arma::cx_mat& channel, double lambda) {
    require_finite(channel, "uplink_spectral_efficiency");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidInputError("uplink_spectral_efficiency: lambda must be finite and non-negative");
    arma::cx_mat gram = lambda * (channel.t() * channel);
    gram.diag() += 1.0;
    gram = 0.5 * (gram + gram.t());
    return arma::log_det_sympd(gram) / std::log(2.0);
}

BeamformerResult transmit_beamformer(const arma::cx_mat& channel, RankPolicy policy) {
    require_finite(channel, "transmit_beamformer");
    if (channel.n_rows == 0 || channel.n_cols == 0)
        throw InvalidInputError("transmit_beamformer: channel must be non-empty");
    uword r = effective_rank(channel, policy, "transmit_beamformer");
    SvdResult dec = svd(channel);
    BeamformerResult out;
    out.transmit = dec.u.cols(0, r - 1);
    out.receive = dec.v.cols(0, r - 1);
    out.rank = r;
    return out;
}

ElementPhase optimal_phase_element(const arma::cx_mat& rank_one, const arma::cx_mat& rest,
                                   double lambda) {
    require_finite(rank_one, "optimal_phase_element");
    require_finite(rest, "optimal_phase_element");
    if (rank_one.n_rows != rest.n_rows || rank_one.n_cols != rest.n_cols)
        throw InvalidInputError("optimal_phase_element: dimension mismatch");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidInputError("optimal_phase_element: lambda must be finite and positive");

    arma::cx_mat a = lambda * (rest * rest.t()) + lambda * (rank_one * rank_one.t());
    a.diag() += 1.0;
    arma::cx_mat solved = pd_solve(a, rest);
    cx_double coupling = arma::trace(rank_one.t() * solved);

    ElementPhase out;
    if (std::abs(coupling) < tol().degenerate_trace) {
        out.degenerate = true;
        return out;
    }
    out.phase = wrap_to_positive(std::arg(coupling));
    return out;
}

double quantize_phase(double phase, unsigned bits) {
    if (bits == 0 || bits > 62)
        throw InvalidInputError("quantize_phase: bit width must be between 1 and 62");
    if (!std::isfinite(phase))
        throw InvalidInputError("quantize_phase: phase must be finite");
    std::int64_t levels = std::int64_t(1) << bits;
    double step = two_pi / static_cast<double>(levels);
    std::int64_t k = std::llround(phase / step) % levels;
    if (k < 0)
        k += levels;
    return static_cast<double>(k) * step;
}

DesignResult design_phases(const arma::cx_mat& direct, const std::vector<arma::cx_mat>& rank_ones,
                           const LinkBudget& budget, const DesignConfig& config,
                           std::vector<double>* ascent_trace) {
    check_design_inputs(direct, rank_ones, budget, "design_phases");
    if (config.max_sweeps == 0)
        throw InvalidInputError("design_phases: at least one refinement sweep is required");

    uword n_irs = rank_ones.size();

    // The power split is fixed once, from the rank of the link with every element at
    // phase zero, and reused throughout so sweeps optimize a single objective.
    arma::cx_mat h_flat = direct;
    for (const auto& r : rank_ones)
        h_flat += r;
    DesignResult out;
    out.rank = effective_rank(h_flat, config.rank_policy, "design_phases");
    out.lambda = budget.downlink_power_w / (static_cast<double>(out.rank) * budget.noise_w);

    std::vector<double> phases(n_irs, 0.0);
    std::vector<bool> flagged(n_irs, false);

    auto best_phase = [&](uword l, const arma::cx_mat& h_minus) {
        ElementPhase ep = optimal_phase_element(rank_ones[l], h_minus, out.lambda);
        if (ep.degenerate && !flagged[l]) {
            flagged[l] = true;
            out.degenerate_elements.push_back(l);
        }
        return ep.phase;
    };

    // Warm-up pass: elements enter one after another, each optimized against the links
    // already placed.
    arma::cx_mat h_tot = direct;
    for (uword l = 0; l < n_irs; ++l) {
        phases[l] = best_phase(l, h_tot);
        h_tot += std::polar(1.0, phases[l]) * rank_ones[l];
    }
    if (ascent_trace)
        ascent_trace->push_back(capacity_log_det(h_tot, out.lambda));

    double threshold = config.stop_threshold > 0.0
                           ? config.stop_threshold
                           : 1e-3 * static_cast<double>(n_irs);
    for (uword sweep = 0; sweep < config.max_sweeps; ++sweep) {
        double moved = 0.0;
        for (uword l = 0; l < n_irs; ++l) {
            arma::cx_mat h_minus = h_tot - std::polar(1.0, phases[l]) * rank_ones[l];
            double next = best_phase(l, h_minus);
            moved += circular_distance(next, phases[l]);
            h_tot = h_minus + std::polar(1.0, next) * rank_ones[l];
            phases[l] = next;
            if (ascent_trace)
                ascent_trace->push_back(capacity_log_det(h_tot, out.lambda));
        }
        ++out.sweeps;
        if (moved < threshold) {
            out.converged = true;
            break;
        }
    }

    if (config.quant_bits > 0) {
        for (double& p : phases)
            p = quantize_phase(p, config.quant_bits);
    }

    out.phases.magnitudes = arma::vec(n_irs, arma::fill::ones);
    out.phases.phases = arma::vec(phases);
    out.phases.quant_bits = config.quant_bits;
    return out;
}

SearchResult exhaustive_search(const arma::cx_mat& direct,
                               const std::vector<arma::cx_mat>& rank_ones,
                               const LinkBudget& budget, unsigned quant_bits,
                               std::uint64_t max_evaluations) {
    check_design_inputs(direct, rank_ones, budget, "exhaustive_search");
    if (quant_bits == 0)
        throw InvalidInputError("exhaustive_search: quantization width must be at least 1 bit");

    uword n_irs = rank_ones.size();
    unsigned total_bits = quant_bits * static_cast<unsigned>(n_irs);
    if (total_bits > 63)
        throw SearchBudgetError("exhaustive_search: " + std::to_string(total_bits) +
                                "-bit phase words cannot be enumerated");
    std::uint64_t count = std::uint64_t(1) << total_bits;
    if (count > max_evaluations)
        throw SearchBudgetError("exhaustive_search: " + std::to_string(count) +
                                " phase words exceed the budget of " +
                                std::to_string(max_evaluations));

    uword full_rank = std::min(direct.n_rows, direct.n_cols);
    double lambda = budget.downlink_power_w / (static_cast<double>(full_rank) * budget.noise_w);

    std::uint64_t levels = std::uint64_t(1) << quant_bits;
    double step = two_pi / static_cast<double>(levels);
    std::vector<cx_double> wheel(levels);
    for (std::uint64_t d = 0; d < levels; ++d)
        wheel[d] = std::polar(1.0, static_cast<double>(d) * step);

    // Element 0 owns the most significant digits, so the first word visited on a tie is
    // the lexicographically smallest one.
    std::uint64_t mask = levels - 1;
    double best_se = -std::numeric_limits<double>::infinity();
    std::uint64_t best_word = 0;
    arma::cx_mat h(direct.n_rows, direct.n_cols);
    for (std::uint64_t word = 0; word < count; ++word) {
        h = direct;
        for (uword l = 0; l < n_irs; ++l) {
            std::uint64_t digit = (word >> (quant_bits * (n_irs - 1 - l))) & mask;
            h += wheel[digit] * rank_ones[l];
        }
        double se = capacity_log_det(h, lambda);
        if (se > best_se) {
            best_se = se;
            best_word = word;
        }
    }

    SearchResult out;
    out.se = best_se;
    out.evaluations = count;
    out.phases.magnitudes = arma::vec(n_irs, arma::fill::ones);
    out.phases.phases = arma::vec(n_irs);
    for (uword l = 0; l < n_irs; ++l) {
        std::uint64_t digit = (best_word >> (quant_bits * (n_irs - 1 - l))) & mask;
        out.phases.phases(l) = static_cast<double>(digit) * step;
    }
    out.phases.quant_bits = quant_bits;
    return out;
}

SEReport effective_spectral_efficiency(const ChannelSet& truth, const PhaseConfig& phases,
                                       const arma::cx_mat& precoder, uword rank,
                                       const LinkBudget& budget, uword coherence_length,
                                       uword training_slots) {
    if (coherence_length == 0)
        throw InvalidInputError("effective_spectral_efficiency: coherence length must be positive");
    if (rank == 0 || precoder.n_cols != rank)
        throw InvalidInputError("effective_spectral_efficiency: precoder width must equal the rank");
    if (!(budget.downlink_power_w > 0.0) || !(budget.noise_w > 0.0))
        throw InvalidInputError("effective_spectral_efficiency: powers must be positive");

    arma::cx_mat h_tot = total_channel(truth.ue_bs, truth.rank_ones, phases);
    if (precoder.n_rows != h_tot.n_rows)
        throw InvalidInputError("effective_spectral_efficiency: precoder does not match the channel");

    SEReport out;
    out.training_slots = training_slots;
    out.coherence_length = coherence_length;
    double lambda = budget.downlink_power_w / (static_cast<double>(rank) * budget.noise_w);
    out.per_use = spectral_efficiency(h_tot, precoder, lambda);
    double share = training_slots >= coherence_length
                       ? 0.0
                       : static_cast<double>(coherence_length - training_slots) /
                             static_cast<double>(coherence_length);
    out.effective = share * out.per_use;
    return out;
}

std::uint64_t complexity_estimate(PhaseTechnique technique, const ComplexityParams& params) {
    if (params.bs == 0 || params.ue == 0 || params.irs == 0)
        throw InvalidInputError("complexity_estimate: array sizes must be at least 1");
    using wide = unsigned __int128;
    wide n = params.bs;
    wide m = params.ue;
    wide l = params.irs;

    switch (technique) {
        case PhaseTechnique::reference_manifold: {
            if (params.outer_iterations == 0 || params.init_iterations == 0)
                throw InvalidInputError("complexity_estimate: iteration counts must be at least 1");
            wide warm = wide(params.init_iterations) * l * m * n;
            wide refine = wide(params.outer_iterations) * l * (4 * m * m * n + 3 * m * m * m);
            return narrow_count(warm + refine);
        }
        case PhaseTechnique::proposed_iterative: {
            if (params.outer_iterations == 0)
                throw InvalidInputError("complexity_estimate: iteration counts must be at least 1");
            wide per = l * (3 * m * m * n + 2 * m * m * m);
            return narrow_count(wide(params.outer_iterations) * per);
        }
        case PhaseTechnique::exhaustive_search: {
            if (params.quant_bits == 0)
                throw InvalidInputError("complexity_estimate: quantization width must be at least 1");
            std::uint64_t words =
                narrow_count(checked_shift(params.quant_bits * static_cast<unsigned>(params.irs)));
            std::uint64_t per_word = narrow_count(l * m * n);
            return narrow_count(wide(words) * wide(per_word));
        }
    }
    throw InvalidInputError("complexity_estimate: unknown technique");
}

}  // namespace irsmimo
