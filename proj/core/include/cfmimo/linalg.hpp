// SPDX-License-Identifier: Apache-2.0
//
// cfmimo: downlink link-level simulator for cell-free massive MIMO with multi-antenna users
// Copyright (C) 2026 The cfmimo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "cfmimo/types.hpp"

// Small dense complex linear-algebra helpers shared by all modules.
// Vectorization is column-major everywhere: vec(X)[c * rows + r] = X(r, c).

namespace cfmimo::linalg {

CVector vec(const CMatrix& x);
CMatrix unvec(const CVector& v, Index rows, Index cols);

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// E{X X^H} from the covariance of vec(X), where X is rows x cols:
/// the sum of the cols diagonal (rows x rows) blocks of cov.
CMatrix sum_diagonal_blocks(const CMatrix& cov, Index rows, Index cols);

/// Same as sum_diagonal_blocks but only over the columns where mask[c] != 0,
/// i.e. E{X G X^H} for the binary diagonal G = diag(mask).
template <typename Mask>
CMatrix masked_diagonal_blocks(const CMatrix& cov, Index rows, const Mask& mask) {
    CMatrix out = CMatrix::Zero(rows, rows);
    for (Index c = 0; c < static_cast<Index>(mask.size()); ++c) {
        if (mask[static_cast<std::size_t>(c)] != 0) {
            out += cov.block(c * rows, c * rows, rows, rows);
        }
    }
    return out;
}

inline CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

bool all_finite(const CMatrix& a);

double min_eigenvalue_hermitian(const CMatrix& a);

/// Hermitian PSD check with tolerance tol * max(1, |tr(a)| / n).
bool is_hermitian_psd(const CMatrix& a, double tol = 1e-10);

/// Principal square root of a Hermitian PSD matrix. Small negative eigenvalues
/// (above -1e-10 * tr / n) are clamped to zero; anything below throws DataError.
CMatrix psd_sqrt(const CMatrix& a);

/// Cholesky factorization of a Hermitian positive-definite matrix that throws
/// NumericalError (tagged with `what`) instead of silently returning garbage.
class HpdFactor {
public:
    HpdFactor() = default;
    explicit HpdFactor(const CMatrix& a, std::string_view what = "matrix");

    CMatrix solve(const CMatrix& rhs) const { return llt_.solve(rhs); }
    CVector solve(const CVector& rhs) const { return llt_.solve(rhs); }
    CMatrix inverse() const;
    /// log2 |A|
    double log2_det() const;
    const Eigen::LLT<CMatrix>& llt() const { return llt_; }
    Index size() const { return llt_.rows(); }

private:
    Eigen::LLT<CMatrix> llt_;
};

double log2_det_hpd(const CMatrix& a);

/// log2 |I + A^H C^{-1} A| for Hermitian PD C. Evaluated through the whitened
/// Gram matrix and cross-checked against log2|C + A A^H| - log2|C|; a
/// disagreement above 1e-9 * max(1, value) throws NumericalError.
double log2_det_capacity(const CMatrix& a, const CMatrix& c);

/// Keep only the listed columns.
CMatrix select_columns(const CMatrix& a, const std::vector<Index>& cols);

}  // namespace cfmimo::linalg
