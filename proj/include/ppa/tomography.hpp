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

/// Simulated single-qubit Pauli tomography and the quantities extracted
/// from tomographic estimates: amplified angle, three-point matrix slope,
/// empirical QFI and conditional quasiprobabilities.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "ppa/errors.hpp"
#include "ppa/fisher.hpp"
#include "ppa/linalg.hpp"
#include "ppa/quantum_core.hpp"
#include "ppa/quasiprob.hpp"

namespace ppa {

inline constexpr double kDefaultSlopeStep = 0.035;

struct TomographyResult {
    DensityMatrix rho_est;
    BlochVector expectations;
    /// "+1" counts in the x, y, z bases.
    std::array<std::uint64_t, 3> counts_plus{};
    std::uint64_t shots_per_basis = 0;
};

/// Linear inversion of Pauli expectations. A reconstruction outside the
/// Bloch ball is projected back by clipping negative eigenvalues and
/// renormalizing the trace.
inline DensityMatrix tomography_from_expectations(const BlochVector &b) {
    const ComplexMatrix linear = bloch_operator(b);
    auto eig = hermitian_eigen(linear);
    if (eig.values(0) >= 0.0) {
        return DensityMatrix(linear);
    }
    Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
    clipped /= clipped.sum();
    const ComplexMatrix m = eig.vectors * clipped.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
    return DensityMatrix(hermitize(m));
}

template <typename Rng>
TomographyResult simulate_tomography(const DensityMatrix &rho_true, std::uint64_t shots_per_basis, Rng &rng) {
    if (rho_true.dim() != 2) {
        throw Error(ErrorCode::dimension_mismatch, "tomography is implemented for qubits");
    }
    if (shots_per_basis < 1) {
        throw Error(ErrorCode::invalid_argument, "shots_per_basis must be at least 1");
    }
    const BlochVector exact = to_bloch(rho_true);
    const std::array<double, 3> expectation{exact.x, exact.y, exact.z};
    std::array<double, 3> mean{};
    std::array<std::uint64_t, 3> plus{};
    const double shots = static_cast<double>(shots_per_basis);
    for (std::size_t k = 0; k < 3; ++k) {
        const double q = std::clamp((1.0 + expectation[k]) / 2.0, 0.0, 1.0);
        plus[k] = std::binomial_distribution<std::uint64_t>(shots_per_basis, q)(rng);
        mean[k] = (2.0 * static_cast<double>(plus[k]) - shots) / shots;
    }
    const BlochVector est{mean[0], mean[1], mean[2]};
    return {tomography_from_expectations(est), est, plus, shots_per_basis};
}

/// Unsigned polar angle of the Bloch vector, in [0, pi].
inline double amplified_angle_from_state(const DensityMatrix &rho_ps) {
    const BlochVector b = to_bloch(rho_ps);
    const double len = b.norm();
    if (!(len > 1e-9)) {
        throw Error(ErrorCode::undefined_angle, "Bloch vector too short to define an angle");
    }
    return std::acos(std::clamp(b.z / len, -1.0, 1.0));
}

/// Least-squares slope through (-d, rho_minus), (0, rho_0), (+d, rho_plus).
inline ComplexMatrix rho_derivative(const DensityMatrix &rho_minus, const DensityMatrix &rho_0,
                                    const DensityMatrix &rho_plus, double dtheta = kDefaultSlopeStep) {
    if (!(dtheta > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "slope step must be positive");
    }
    if (rho_minus.dim() != rho_0.dim() || rho_plus.dim() != rho_0.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "slope states differ in dimension");
    }
    return hermitize((rho_plus.matrix() - rho_minus.matrix()) / (2.0 * dtheta));
}

/// QFI from estimated state and derivative. Estimated eigenvalues below
/// 1e-2 of the largest are treated as outside the support, and the
/// derivative's component there is dropped rather than rejected.
inline double empirical_qfi(const DensityMatrix &rho_est, const ComplexMatrix &drho_est) {
    SldOptions opts;
    opts.pinv_cutoff = 1e-2;
    opts.enforce_consistency = false;
    return sld(rho_est, hermitize(drho_est), opts).qfi;
}

/// Conditional table p(a, a' | +) computed on an unpostselected state
/// estimate.
inline KdTable kd_from_tomography(const DensityMatrix &rho_unpostselected, cplx t) {
    if (rho_unpostselected.dim() != 2) {
        throw Error(ErrorCode::dimension_mismatch, "expected a qubit state");
    }
    const KrausPair k = make_filter(t);
    const double p = (k.k_plus * rho_unpostselected.matrix() * k.k_plus.adjoint()).trace().real();
    if (!(p >= 1e-12)) {
        throw Error(ErrorCode::zero_probability, "postselection probability of the estimate below 1e-12");
    }
    return conditional_ppa_table(rho_unpostselected, t);
}

}  // namespace ppa
