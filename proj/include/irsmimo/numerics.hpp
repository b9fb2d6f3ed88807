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

#include "irsmimo/common.hpp"

namespace irsmimo {

// Throws InvalidInputError when the matrix is empty or has NaN/Inf entries.
void require_finite(const arma::cx_mat& a, const char* what);

struct SvdResult {
    arma::cx_mat u;  // rows x rows, orthonormal columns
    arma::vec s;     // min(rows, cols) singular values, non-increasing
    arma::cx_mat v;  // cols x cols, orthonormal columns
};

// Full singular value decomposition a = u * diag(s) * v^H with a fixed phase gauge:
// each left singular vector is rotated so its first nonzero entry is real non-negative
// (the paired right vector is rotated by the same factor). The gauge makes repeated
// factorizations of the same matrix byte-reproducible, which downstream angle-extraction
// code relies on.
SvdResult svd(const arma::cx_mat& a);

// Solves a * x = b for Hermitian positive definite a. Rejects inputs that are not
// Hermitian to within tol().hermitian_check (relative Frobenius), and refuses to solve
// when the smallest eigenvalue does not exceed tol().singularity_ratio times the largest.
arma::cx_mat pd_solve(const arma::cx_mat& a, const arma::cx_mat& b);

// Unitary n x n DFT matrix, entry (k, m) = exp(-2*pi*i*k*m/n) / sqrt(n).
arma::cx_mat dft_matrix(uword n);

// log2 det(I + lambda * h * h^H), evaluated through the singular values of h as
// sum log2(1 + lambda * s_i^2). The singular-value route stays accurate for the very
// large lambda values produced by realistic transmit-power to noise-floor ratios.
double capacity_log_det(const arma::cx_mat& h, double lambda);

}  // namespace irsmimo
