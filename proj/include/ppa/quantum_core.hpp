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

/// Finite-dimensional states, phase-imprinting unitaries and two-outcome
/// partial-postselection filters.
///
/// Basis convention used everywhere in the library: |0> is horizontal
/// polarization and the +z pole of the Bloch sphere, |1> is vertical, and
/// |a+-> = (|0> +- |1>)/sqrt(2) are the eigenstates of sigma_x / 2.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ppa/errors.hpp"
#include "ppa/linalg.hpp"

namespace ppa {

inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;

/// Hermitian, unit-trace, positive-semidefinite operator. Construction
/// validates the invariants; instances are immutable.
class DensityMatrix {
public:
    explicit DensityMatrix(const ComplexMatrix &m) {
        if (!is_square(m)) {
            throw Error(ErrorCode::dimension_mismatch, "density matrix must be square and nonempty");
        }
        if (!all_finite(m)) {
            throw Error(ErrorCode::not_physical, "density matrix has non-finite entries");
        }
        if (hermitian_defect(m) > kStructuralTol) {
            throw Error(ErrorCode::not_physical, "density matrix is not Hermitian");
        }
        if (std::abs(m.trace() - cplx(1.0)) > kStructuralTol) {
            throw Error(ErrorCode::not_physical, "density matrix trace differs from 1");
        }
        mat_ = hermitize(m);
        if (min_eigenvalue(mat_) < -kStructuralTol) {
            throw Error(ErrorCode::not_physical, "density matrix has a negative eigenvalue");
        }
    }

    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(const ComplexVector &psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) {
            throw Error(ErrorCode::not_physical, "cannot build a state from the zero vector");
        }
        return DensityMatrix(outer(psi, psi) / (norm * norm));
    }

    static DensityMatrix maximally_mixed(Index dim) {
        return DensityMatrix(identity(dim) / static_cast<double>(dim));
    }

    const ComplexMatrix &matrix() const {
        return mat_;
    }

    Index dim() const {
        return mat_.rows();
    }

    double purity() const {
        return (mat_ * mat_).trace().real();
    }

    /// <psi| rho |psi> for normalized psi.
    double fidelity_with(const ComplexVector &psi) const {
        const double n2 = psi.squaredNorm();
        return (psi.adjoint() * mat_ * psi)(0, 0).real() / n2;
    }

private:
    ComplexMatrix mat_;
};

/// Hermitian observable with its spectral decomposition. Eigenvalues that
/// agree within the degeneracy tolerance share one (possibly
/// multidimensional) projector.
class Generator {
public:
    explicit Generator(const ComplexMatrix &m, double degeneracy_tol = 1e-9) {
        if (!is_square(m) || !all_finite(m)) {
            throw Error(ErrorCode::invalid_generator, "generator must be a finite square matrix");
        }
        if (hermitian_defect(m) > kStructuralTol) {
            throw Error(ErrorCode::invalid_generator, "generator is not Hermitian");
        }
        mat_ = hermitize(m);
        auto eig = hermitian_eigen(mat_);
        const Index n = eig.values.size();
        const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
        Index start = 0;
        while (start < n) {
            Index stop = start + 1;
            while (stop < n && eig.values(stop) - eig.values(start) <= degeneracy_tol * scale) {
                ++stop;
            }
            const Index width = stop - start;
            const ComplexMatrix v = eig.vectors.middleCols(start, width);
            values_.push_back(eig.values.segment(start, width).mean());
            projectors_.push_back(v * v.adjoint());
            start = stop;
        }
    }

    const ComplexMatrix &matrix() const {
        return mat_;
    }

    Index dim() const {
        return mat_.rows();
    }

    /// Distinct eigenvalues, ascending.
    std::span<const double> eigenvalues() const {
        return values_;
    }

    /// Eigenprojectors, in the order of eigenvalues().
    const std::vector<ComplexMatrix> &projectors() const {
        return projectors_;
    }

    double max_eigenvalue() const {
        return values_.back();
    }

    double min_eigenvalue() const {
        return values_.front();
    }

    /// Spectral spread a_max - a_min.
    double spread() const {
        return values_.back() - values_.front();
    }

private:
    ComplexMatrix mat_;
    std::vector<double> values_;
    std::vector<ComplexMatrix> projectors_;
};

/// Success and failure operators of a two-outcome filter, with
/// K+^dagger K+ + K-^dagger K- = 1.
struct KrausPair {
    ComplexMatrix k_plus;
    ComplexMatrix k_minus;

    /// Completes a success operator with K- = sqrt(1 - K+^dagger K+).
    static KrausPair from_success(const ComplexMatrix &k_plus) {
        if (!is_square(k_plus)) {
            throw Error(ErrorCode::dimension_mismatch, "Kraus operator must be square");
        }
        const ComplexMatrix effect = hermitize(k_plus.adjoint() * k_plus);
        if (max_eigenvalue(effect) > 1.0 + kStructuralTol) {
            throw Error(ErrorCode::not_physical, "K^dagger K exceeds the identity");
        }
        return {k_plus, psd_sqrt(identity(k_plus.rows()) - effect)};
    }

    double completeness_defect() const {
        return (k_plus.adjoint() * k_plus + k_minus.adjoint() * k_minus - identity(k_plus.rows())).norm();
    }
};

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const {
        return std::sqrt(x * x + y * y + z * z);
    }
};

inline BlochVector to_bloch(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw Error(ErrorCode::dimension_mismatch, "Bloch representation needs a qubit");
    }
    const auto &m = rho.matrix();
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

/// (1 + x sigma_x + y sigma_y + z sigma_z) / 2.
inline ComplexMatrix bloch_operator(const BlochVector &b) {
    return (identity(2) + b.x * pauli_x() + b.y * pauli_y() + b.z * pauli_z()) / 2.0;
}

inline DensityMatrix from_bloch(const BlochVector &b) {
    if (b.norm() > 1.0 + kStructuralTol) {
        throw Error(ErrorCode::not_physical, "Bloch vector longer than 1");
    }
    return DensityMatrix(bloch_operator(b));
}

/// U = sum_i exp(i theta a_i) Pi_i.
inline ComplexMatrix phase_unitary(const Generator &a, double theta) {
    ComplexMatrix u = ComplexMatrix::Zero(a.dim(), a.dim());
    const auto values = a.eigenvalues();
    for (std::size_t k = 0; k < values.size(); ++k) {
        u += std::polar(1.0, theta * values[k]) * a.projectors()[k];
    }
    return u;
}

inline ComplexMatrix phase_unitary(const ComplexMatrix &a, double theta) {
    return phase_unitary(Generator(a), theta);
}

/// U rho U^dagger.
inline DensityMatrix evolve(const DensityMatrix &rho, const ComplexMatrix &u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "unitary and state dimensions differ");
    }
    if (!is_unitary(u, kStructuralTol)) {
        throw Error(ErrorCode::not_unitary, "evolution operator is not unitary");
    }
    return DensityMatrix(hermitize(u * rho.matrix() * u.adjoint()));
}

using Basis = std::pair<ComplexVector, ComplexVector>;

inline Basis computational_basis() {
    return {basis_vector(2, 0), basis_vector(2, 1)};
}

/// K+ = t |b0><b0| + |b1><b1|, K- = sqrt(1 - |t|^2) |b0><b0|.
inline KrausPair make_filter(cplx t, const Basis &basis = computational_basis()) {
    const double mag = std::abs(t);
    if (!(mag <= 1.0 + kRoundTripTol)) {
        throw Error(ErrorCode::not_physical, "filter amplitude |t| > 1");
    }
    const auto &[b0, b1] = basis;
    if (b0.size() != b1.size()) {
        throw Error(ErrorCode::dimension_mismatch, "filter basis vectors differ in size");
    }
    if (std::abs(b0.squaredNorm() - 1.0) > kStructuralTol || std::abs(b1.squaredNorm() - 1.0) > kStructuralTol ||
        std::abs(b0.dot(b1)) > kStructuralTol) {
        throw Error(ErrorCode::invalid_argument, "filter basis is not orthonormal");
    }
    const ComplexMatrix p0 = outer(b0, b0);
    const ComplexMatrix p1 = outer(b1, b1);
    const double fail = std::sqrt(std::max(0.0, 1.0 - mag * mag));
    return {t * p0 + p1, fail * p0};
}

struct Postselected {
    DensityMatrix state;
    double probability;
};

/// Conditional state K rho K^dagger / p with p = Tr(K rho K^dagger).
inline Postselected postselect(const DensityMatrix &rho, const ComplexMatrix &k) {
    if (k.rows() != rho.dim() || k.cols() != rho.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "Kraus operator and state dimensions differ");
    }
    const ComplexMatrix unnormalized = k * rho.matrix() * k.adjoint();
    const double p = unnormalized.trace().real();
    if (!(p >= 1e-15)) {
        throw Error(ErrorCode::zero_probability, "postselection probability below 1e-15");
    }
    return {DensityMatrix(hermitize(unnormalized / p)), p};
}

/// p_ps(theta, t) = |t|^2 cos^2(delta theta / 2) + sin^2(delta theta / 2).
inline double ppa_survival_probability(double theta, double t_mag, double delta = 1.0) {
    const double c = std::cos(delta * theta / 2.0);
    const double s = std::sin(delta * theta / 2.0);
    return t_mag * t_mag * c * c + s * s;
}

/// Theta with tan(delta Theta / 2) = tan(delta theta / 2) / |t|, on the
/// branch continuous in theta with Theta(0) = 0.
inline double amplified_angle(double theta, double t_mag, double delta = 1.0) {
    if (!(delta > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "eigenvalue spread must be positive");
    }
    if (!(t_mag >= 0.0 && t_mag <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "|t| must lie in [0, 1]");
    }
    if (!(std::abs(delta * theta) < kPi)) {
        throw Error(ErrorCode::invalid_argument, "delta * theta must lie in (-pi, pi)");
    }
    if (t_mag == 0.0) {
        if (theta == 0.0) {
            throw Error(ErrorCode::undefined_amplification, "theta = 0 with t = 0");
        }
        return std::copysign(kPi / delta, theta);
    }
    return 2.0 / delta * std::atan2(std::tan(delta * theta / 2.0), t_mag);
}

/// Inverse of amplified_angle: theta = (2 / delta) atan(|t| tan(delta Theta / 2)).
inline double deamplified_angle(double amplified, double t_mag, double delta = 1.0) {
    const double half = delta * amplified / 2.0;
    return 2.0 / delta * std::atan2(t_mag * std::sin(half), std::cos(half));
}

/// G G^dagger / Tr(G G^dagger) for a complex Ginibre G; full rank almost surely.
template <typename Rng>
DensityMatrix random_density_matrix(Index dim, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = cplx(normal(rng), normal(rng));
        }
    }
    const ComplexMatrix m = g * g.adjoint();
    return DensityMatrix(hermitize(m / m.trace().real()));
}

/// cos(delta Theta / 2) |0> + i sin(delta Theta / 2) |1>.
inline ComplexVector amplified_state(double amplified, double delta = 1.0) {
    ComplexVector psi(2);
    psi << std::cos(delta * amplified / 2.0), cplx(0.0, std::sin(delta * amplified / 2.0));
    return psi;
}

}  // namespace ppa
