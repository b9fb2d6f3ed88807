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
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace irsmimo {

using arma::uword;
using cx_double = std::complex<double>;

// ------------------------------------------------------------------------------------------------
// Error types
// ------------------------------------------------------------------------------------------------

// Malformed arguments: bad dimensions, non-finite entries, unknown tags, out-of-range parameters.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A positive-definite solve was asked to factor a numerically singular matrix.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A projection denominator collapsed, so a ratio estimate is undefined.
struct DegenerateProjectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A channel (or channel estimate) is identically zero where structure is required.
struct DegenerateChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A brute-force search was requested with more evaluations than the configured budget.
struct SearchBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------------------------------------------
// Library-wide numeric tolerances
// ------------------------------------------------------------------------------------------------

struct Tolerances {
    double hermitian_check = 1e-10;      // relative asymmetry allowed in pd_solve inputs
    double singularity_ratio = 1e-14;    // min/max eigenvalue ratio below which pd_solve refuses
    double beamformer_norm = 1e-9;       // allowed deviation of a training beamformer from unit norm
    double degenerate_trace = 1e-15;     // trace magnitude treated as "no coupling" in phase design
    double projection_floor = 1e-14;     // relative denominator floor for ratio-based estimators
    double rank_threshold = 1e-6;        // default relative singular-value cutoff for numeric rank
};

inline const Tolerances& tol() {
    static const Tolerances t{};
    return t;
}

// ------------------------------------------------------------------------------------------------
// Unit conversions
// ------------------------------------------------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// ------------------------------------------------------------------------------------------------
// Deterministic random streams
// ------------------------------------------------------------------------------------------------

// splitmix64 finalizer; used to turn (seed, offset) pairs into well-separated stream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t offset) {
    std::uint64_t z = seed + (offset + 1u) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seeded random stream. Substreams are derived from the original seed (not the current
// position), so derivation order never depends on how much the parent has already drawn.
// Gaussians come from an explicit Box-Muller transform on raw 53-bit uniforms to keep the
// byte-level output independent of the standard library's distribution internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix_seed(seed, 0)) {}

    std::uint64_t seed() const { return seed_; }

    Rng substream(std::uint64_t offset) const { return Rng(mix_seed(seed_, offset + 1)); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Circularly symmetric complex Gaussian with E|z|^2 = 1.
    cx_double complex_gaussian() {
        // u1 on (0, 1] so the log is finite; u2 on [0, 1).
        double u1 = static_cast<double>((gen_() >> 11) + 1u) * 0x1.0p-53;
        double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-std::log(u1));
        double th = 2.0 * arma::datum::pi * u2;
        return {r * std::cos(th), r * std::sin(th)};
    }

    // Matrix of i.i.d. complex Gaussians with per-entry second moment `variance`.
    arma::cx_mat complex_gaussian_matrix(uword rows, uword cols, double variance = 1.0) {
        arma::cx_mat out(rows, cols);
        double scale = std::sqrt(variance);
        for (uword c = 0; c < cols; ++c)
            for (uword r = 0; r < rows; ++r)
                out(r, c) = scale * complex_gaussian();
        return out;
    }

    arma::cx_vec complex_gaussian_vector(uword n, double variance = 1.0) {
        return arma::cx_vec(complex_gaussian_matrix(n, 1, variance));
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace irsmimo
