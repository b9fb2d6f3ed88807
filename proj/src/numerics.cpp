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

#include "irsmimo/numerics.hpp"

#include <cmath>
#include <string>

namespace irsmimo {

void require_finite(const arma::cx_mat& a, const char* what) {
    if (a.n_rows == 0 || a.n_cols == 0)
        throw InvalidInputError(std::string(what) + ": matrix must be non-empty");
    if (!a.is_finite())
        throw InvalidInputError(std::string(what) + ": matrix has non-finite entries");
}

namespace {

// Rotates column j of m so its first nonzero entry becomes real non-negative.
// Returns the applied unit factor so a paired matrix can be rotated consistently.
cx_double gauge_column(arma::cx_mat& m, uword j) {
    for (uword r = 0; r < m.n_rows; ++r) {
        double mag = std::abs(m(r, j));
        if (mag > 0.0) {
            cx_double factor = std::conj(m(r, j)) / mag;
            m.col(j) *= factor;
            return factor;
        }
    }
    return {1.0, 0.0};
}

}  // namespace

SvdResult svd(const arma::cx_mat& a) {
    require_finite(a, "svd");

    SvdResult res;
    if (!arma::svd(res.u, res.s, res.v, a))
        throw std::runtime_error("svd: factorization failed to converge");

    uword paired = std::min(a.n_rows, a.n_cols);
    for (uword j = 0; j < res.u.n_cols; ++j) {
        cx_double factor = gauge_column(res.u, j);
        if (j < paired)
            res.v.col(j) *= factor;
    }
    // Trailing right null-space columns have no left partner; gauge them on their own
    // so the full factorization is reproducible too.
    for (uword j = paired; j < res.v.n_cols; ++j)
        gauge_column(res.v, j);

    return res;
}

arma::cx_mat pd_solve(const arma::cx_mat& a, const arma::cx_mat& b) {
    require_finite(a, "pd_solve");
    require_finite(b, "pd_solve");
    if (a.n_rows != a.n_cols)
        throw InvalidInputError("pd_solve: coefficient matrix must be square");
    if (a.n_rows != b.n_rows)
        throw InvalidInputError("pd_solve: dimension mismatch between lhs and rhs");

    double scale = std::max(1.0, arma::norm(a, "fro"));
    if (arma::norm(a - a.t(), "fro") > tol().hermitian_check * scale)
        throw InvalidInputError("pd_solve: coefficient matrix is not Hermitian");

    arma::vec eval;
    arma::cx_mat evec;
    if (!arma::eig_sym(eval, evec, arma::cx_mat((a + a.t()) / 2.0)))
        throw std::runtime_error("pd_solve: eigendecomposition failed");

    double largest = eval.max();
    if (largest <= 0.0 || eval.min() <= tol().singularity_ratio * largest)
        throw SingularMatrixError("pd_solve: matrix is numerically singular or not positive definite");

    arma::cx_mat y = evec.t() * b;
    for (uword i = 0; i < eval.n_elem; ++i)
        y.row(i) /= eval(i);
    return evec * y;
}

arma::cx_mat dft_matrix(uword n) {
    if (n == 0)
        throw InvalidInputError("dft_matrix: size must be at least 1");

    arma::cx_mat f(n, n);
    double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (uword k = 0; k < n; ++k) {
        for (uword m = 0; m < n; ++m) {
            // Reduce k*m mod n before the trig call so the angle never grows with n^2.
            double ang = -2.0 * arma::datum::pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
            f(k, m) = norm * cx_double(std::cos(ang), std::sin(ang));
        }
    }
    return f;
}

double capacity_log_det(const arma::cx_mat& h, double lambda) {
    require_finite(h, "capacity_log_det");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw InvalidInputError("capacity_log_det: lambda must be finite and non-negative");

    arma::vec s = arma::svd(h);
    double sum = 0.0;
    for (double v : s)
        sum += std::log1p(lambda * v * v);
    return sum / std::log(2.0);
}

}  // namespace irsmimo
