// Copyright 2026 The ppa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// Dense complex linear algebra helpers for the small (d <= 8) operators
/// used throughout the library. Matrix functions go through the Hermitian
/// eigendecomposition rather than series expansions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "ppa/errors.hpp"

namespace ppa {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

inline ComplexMatrix identity(Index dim) {
    return ComplexMatrix::Identity(dim, dim);
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline ComplexVector basis_vector(Index dim, Index k) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return v;
}

inline ComplexMatrix outer(const ComplexVector &a, const ComplexVector &b) {
    return a * b.adjoint();
}

inline bool is_square(const ComplexMatrix &m) {
    return m.rows() == m.cols() && m.rows() >= 1;
}

inline bool all_finite(const ComplexMatrix &m) {
    return m.allFinite();
}

/// Largest entry magnitude of M - M^dagger.
inline double hermitian_defect(const ComplexMatrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix &m, double tol) {
    return is_square(m) && hermitian_defect(m) <= tol;
}

inline bool is_unitary(const ComplexMatrix &m, double tol) {
    if (!is_square(m)) {
        return false;
    }
    return (m.adjoint() * m - identity(m.rows())).norm() <= tol;
}

inline ComplexMatrix hermitize(const ComplexMatrix &m) {
    return (m + m.adjoint()) / 2.0;
}

/// Kronecker product X (x) Y.
inline ComplexMatrix kron(const ComplexMatrix &x, const ComplexMatrix &y) {
    ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Index i = 0; i < x.rows(); ++i) {
        for (Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

/// Row-major vectorization: vec(Y)[i * cols + j] = Y(i, j). With this
/// ordering vec(X Y Z) = (X (x) Z^T) vec(Y).
inline ComplexVector vec_row_major(const ComplexMatrix &m) {
    ComplexVector v(m.size());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            v(i * m.cols() + j) = m(i, j);
        }
    }
    return v;
}

inline ComplexMatrix unvec_row_major(const ComplexVector &v, Index rows, Index cols) {
    if (v.size() != rows * cols) {
        throw Error(ErrorCode::dimension_mismatch, "unvec: vector length does not match shape");
    }
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            m(i, j) = v(i * cols + j);
        }
    }
    return m;
}

/// Moore-Penrose inverse. Singular values below rel_cutoff * sigma_max are
/// treated as zero.
inline ComplexMatrix pseudo_inverse(const ComplexMatrix &m, double rel_cutoff = 1e-12) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Index k = 0; k < s.size(); ++k) {
        if (smax > 0.0 && s(k) > rel_cutoff * smax) {
            inv(k) = 1.0 / s(k);
        }
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

struct HermitianEigen {
    Eigen::VectorXd values;  // ascending
    ComplexMatrix vectors;   // columns
};

inline HermitianEigen hermitian_eigen(const ComplexMatrix &h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(h));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::invalid_argument, "Hermitian eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(H) = V f(diag) V^dagger for Hermitian H; f maps a real eigenvalue to
/// a complex number.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix &h, F &&f) {
    auto eig = hermitian_eigen(h);
    ComplexVector mapped(eig.values.size());
    for (Index k = 0; k < eig.values.size(); ++k) {
        mapped(k) = cplx(f(eig.values(k)));
    }
    return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

/// Principal square root of a positive-semidefinite matrix. Eigenvalues in
/// [-tol, 0) are clamped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix &h, double tol = 1e-10) {
    return hermitian_function(h, [tol](double x) {
        if (x < -tol) {
            throw Error(ErrorCode::not_physical, "square root of a matrix with a negative eigenvalue");
        }
        return std::sqrt(std::max(x, 0.0));
    });
}

inline double min_eigenvalue(const ComplexMatrix &h) {
    return hermitian_eigen(h).values(0);
}

inline double max_eigenvalue(const ComplexMatrix &h) {
    auto eig = hermitian_eigen(h);
    return eig.values(eig.values.size() - 1);
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phases of R's diagonal divided out.
template <typename Rng>
ComplexMatrix random_unitary(Index dim, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = cplx(normal(rng), normal(rng));
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * identity(dim);
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const cplx d = r(k, k);
        const double mag = std::abs(d);
        q.col(k) *= mag > 0 ? d / mag : cplx(1.0);
    }
    return q;
}

}  // namespace ppa
