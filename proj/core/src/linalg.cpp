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

#include "cfmimo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace cfmimo::linalg {

CVector vec(const CMatrix& x) {
    return Eigen::Map<const CVector>(x.data(), x.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
    if (v.size() != rows * cols) {
        throw ConfigError("unvec: vector length does not match requested shape");
    }
    return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix sum_diagonal_blocks(const CMatrix& cov, Index rows, Index cols) {
    if (cov.rows() != rows * cols || cov.cols() != rows * cols) {
        throw ConfigError("sum_diagonal_blocks: covariance has wrong dimension");
    }
    CMatrix out = CMatrix::Zero(rows, rows);
    for (Index c = 0; c < cols; ++c) {
        out += cov.block(c * rows, c * rows, rows, rows);
    }
    return out;
}

bool all_finite(const CMatrix& a) {
    return a.allFinite();
}

double min_eigenvalue_hermitian(const CMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_hermitian_psd(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) {
        return false;
    }
    const auto n = static_cast<double>(std::max<Index>(1, a.rows()));
    const double scale = std::max(1.0, std::abs(a.trace()) / n);
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol * scale * 10.0) {
        return false;
    }
    return min_eigenvalue_hermitian(a) >= -tol * scale;
}

CMatrix psd_sqrt(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw ConfigError("psd_sqrt: matrix is not square");
    }
    if (!a.allFinite()) {
        throw DataError("psd_sqrt: non-finite entries");
    }
    if (a.size() == 0) {
        return a;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
    if (es.info() != Eigen::Success) {
        throw NumericalError("psd_sqrt: eigendecomposition failed");
    }
    const double floor = -1e-10 * std::max(1e-300, std::abs(a.trace()) / static_cast<double>(a.rows()));
    RVector lambda = es.eigenvalues();
    if (lambda.minCoeff() < floor) {
        throw DataError("psd_sqrt: matrix is indefinite (min eigenvalue " +
                        std::to_string(lambda.minCoeff()) + ")");
    }
    lambda = lambda.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

HpdFactor::HpdFactor(const CMatrix& a, std::string_view what) {
    if (a.rows() != a.cols()) {
        throw ConfigError(std::string(what) + ": matrix is not square");
    }
    if (!a.allFinite()) {
        throw DataError(std::string(what) + ": non-finite entries");
    }
    llt_.compute(hermitian_part(a));
    if (llt_.info() != Eigen::Success) {
        throw NumericalError(std::string(what) + ": Hermitian factorization failed (not positive definite)");
    }
}

CMatrix HpdFactor::inverse() const {
    return llt_.solve(CMatrix::Identity(size(), size()));
}

double HpdFactor::log2_det() const {
    const auto& l = llt_.matrixLLT();
    double acc = 0.0;
    for (Index i = 0; i < l.rows(); ++i) {
        acc += std::log2(l(i, i).real());
    }
    return 2.0 * acc;
}

double log2_det_hpd(const CMatrix& a) {
    return HpdFactor(a, "log2_det_hpd").log2_det();
}

double log2_det_capacity(const CMatrix& a, const CMatrix& c) {
    if (c.rows() != a.rows()) {
        throw ConfigError("log2_det_capacity: dimension mismatch");
    }
    if (a.cols() == 0) {
        return 0.0;
    }
    HpdFactor cf(c, "capacity noise covariance");
    // Whitened channel X = L^{-1} A so that A^H C^{-1} A = X^H X.
    const CMatrix x = cf.llt().matrixL().solve(a);
    const CMatrix gram = CMatrix::Identity(a.cols(), a.cols()) + x.adjoint() * x;
    const double direct = HpdFactor(gram, "capacity Gram matrix").log2_det();

    const CMatrix big = c + a * a.adjoint();
    const double via_identity = HpdFactor(big, "capacity signal-plus-noise").log2_det() - cf.log2_det();
    if (std::abs(direct - via_identity) > 1e-9 * std::max(1.0, std::abs(direct))) {
        throw NumericalError("log2_det_capacity: determinant identity check failed (" +
                             std::to_string(direct) + " vs " + std::to_string(via_identity) + ")");
    }
    return direct;
}

CMatrix select_columns(const CMatrix& a, const std::vector<Index>& cols) {
    CMatrix out(a.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        out.col(static_cast<Index>(j)) = a.col(cols[j]);
    }
    return out;
}

}  // namespace cfmimo::linalg
