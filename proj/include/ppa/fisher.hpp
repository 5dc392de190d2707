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

/// Quantum and classical Fisher information for phase families, the
/// symmetric logarithmic derivative (SLD) and the optimal projective
/// measurement for partially postselected amplification.

#include <cmath>
#include <algorithm>
#include <concepts>
#include <utility>

#include "ppa/errors.hpp"
#include "ppa/linalg.hpp"
#include "ppa/quantum_core.hpp"

namespace ppa {

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double x) {
    double r = std::fmod(x + kPi, 2.0 * kPi);
    if (r < 0.0) {
        r += 2.0 * kPi;
    }
    return r - kPi;
}

struct SldOptions {
    /// Relative Moore-Penrose cutoff on the Sylvester operator; also the
    /// relative eigenvalue threshold that defines support(rho).
    double pinv_cutoff = 1e-12;
    /// Throw when the Sylvester defect outside support(rho) exceeds
    /// inconsistency_tol.
    bool enforce_consistency = true;
    double inconsistency_tol = 1e-6;
};

struct SldResult {
    ComplexMatrix lambda;
    double qfi = 0.0;
    /// Frobenius norm of d rho - (Lambda rho + rho Lambda)/2 with the
    /// ker(rho) x ker(rho) block removed.
    double residual = 0.0;
};

/// Solves d rho / d theta = (Lambda rho + rho Lambda) / 2 through
/// vec(Lambda) = ((rho (x) 1 + 1 (x) rho^T) / 2)^+ vec(d rho) in row-major
/// order. The QFI is Tr(d rho Lambda).
inline SldResult sld(const DensityMatrix &rho, const ComplexMatrix &drho, const SldOptions &opts = {}) {
    const Index n = rho.dim();
    if (drho.rows() != n || drho.cols() != n) {
        throw Error(ErrorCode::dimension_mismatch, "state and derivative dimensions differ");
    }
    if (hermitian_defect(drho) > 1e-9) {
        throw Error(ErrorCode::invalid_argument, "state derivative is not Hermitian");
    }
    if (std::abs(drho.trace()) > 1e-9) {
        throw Error(ErrorCode::invalid_argument, "state derivative is not traceless");
    }
    const ComplexMatrix &r = rho.matrix();
    const ComplexMatrix id = identity(n);
    const ComplexMatrix sylvester = (kron(r, id) + kron(id, r.transpose())) / 2.0;
    const ComplexVector solution = pseudo_inverse(sylvester, opts.pinv_cutoff) * vec_row_major(drho);
    SldResult out;
    out.lambda = hermitize(unvec_row_major(solution, n, n));

    auto eig = hermitian_eigen(r);
    const double top = eig.values(n - 1);
    ComplexMatrix kernel = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        if (eig.values(k) <= opts.pinv_cutoff * top) {
            kernel += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
        }
    }
    const ComplexMatrix defect = drho - (out.lambda * r + r * out.lambda) / 2.0;
    const ComplexMatrix outside = kernel * defect * kernel;
    out.residual = (defect - outside).norm();
    if (opts.enforce_consistency && outside.norm() > opts.inconsistency_tol) {
        throw Error(ErrorCode::inconsistent_derivative,
                    "derivative has a component outside the support of the state");
    }
    out.qfi = (drho * out.lambda).trace().real();
    return out;
}

/// Postselected QFI of the ideal PPA family, (delta |t| / p_ps)^2.
inline double qfi_ppa_theory(double theta, double t_mag, double delta = 1.0) {
    if (!(t_mag > 0.0 && t_mag <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "|t| must lie in (0, 1]");
    }
    const double p = ppa_survival_probability(theta, t_mag, delta);
    if (!(p > 0.0)) {
        throw Error(ErrorCode::zero_probability, "postselection probability is zero");
    }
    const double root = delta * t_mag / p;
    return root * root;
}

/// Pure-state postselected QFI,
///   4/p Tr(A rho A E) - 4/p^2 |Tr(A rho E)|^2,  E = K+^dagger K+,
/// where rho is the already-evolved state and p = Tr(rho E).
inline double qfi_postselected_pure(const DensityMatrix &rho_theta, const Generator &a, const ComplexMatrix &k_plus) {
    if (rho_theta.dim() != a.dim() || k_plus.rows() != a.dim() || k_plus.cols() != a.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "state, generator and Kraus operator dimensions differ");
    }
    if (rho_theta.purity() < 1.0 - 1e-8) {
        throw Error(ErrorCode::not_pure, "postselected-QFI formula needs a pure state");
    }
    const ComplexMatrix &r = rho_theta.matrix();
    const ComplexMatrix &gen = a.matrix();
    const ComplexMatrix effect = k_plus.adjoint() * k_plus;
    const double p = (r * effect).trace().real();
    if (!(p > 1e-12)) {
        throw Error(ErrorCode::zero_probability, "postselection probability below 1e-12");
    }
    const double first = (gen * r * gen * effect).trace().real();
    const double second = std::norm((gen * r * effect).trace());
    return 4.0 / p * first - 4.0 / (p * p) * second;
}

/// Projective qubit measurement along the Bloch direction with polar angle
/// theta_opt and azimuth phi_opt.
struct MeasurementDirection {
    double theta_opt = kPi / 2.0;
    double phi_opt = 0.0;

    BlochVector axis() const {
        return {std::sin(theta_opt) * std::cos(phi_opt), std::sin(theta_opt) * std::sin(phi_opt), std::cos(theta_opt)};
    }

    /// Projector onto the "+" outcome, (1 + n . sigma) / 2.
    ComplexMatrix projector() const {
        return bloch_operator(axis());
    }

    static MeasurementDirection from_axis(const BlochVector &n) {
        const double len = n.norm();
        if (!(len > 0.0)) {
            throw Error(ErrorCode::invalid_argument, "measurement axis has zero length");
        }
        return {std::acos(std::clamp(n.z / len, -1.0, 1.0)), wrap_angle(std::atan2(n.y, n.x))};
    }
};

/// Angle in [0, pi/2] between two unoriented axes.
inline double axis_angle(const BlochVector &a, const BlochVector &b) {
    const double dot = a.x * b.x + a.y * b.y + a.z * b.z;
    const double cross_x = a.y * b.z - a.z * b.y;
    const double cross_y = a.z * b.x - a.x * b.z;
    const double cross_z = a.x * b.y - a.y * b.x;
    return std::atan2(std::sqrt(cross_x * cross_x + cross_y * cross_y + cross_z * cross_z), std::abs(dot));
}

/// Bloch direction of the traceless part of a qubit operator.
inline BlochVector operator_axis(const ComplexMatrix &m) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw Error(ErrorCode::dimension_mismatch, "operator_axis needs a 2x2 operator");
    }
    return {(m(0, 1) + m(1, 0)).real(), (m(1, 0) - m(0, 1)).imag(), (m(0, 0) - m(1, 1)).real()};
}

/// Optimal projective measurement for the PPA qubit family, given a prior
/// estimate of theta:
///   cot(theta_opt) = (1 + |t|^2) / (2 |t|) tan(theta_prior),
///   phi_opt = -pi/2 - arg(t)
/// in the library's fixed Bloch frame. theta_opt does not depend on the
/// source visibility.
inline MeasurementDirection optimal_measurement(double theta_prior, cplx t) {
    const double mag = std::abs(t);
    if (!(mag > 0.0 && mag <= 1.0 + kRoundTripTol)) {
        throw Error(ErrorCode::invalid_argument, "optimal measurement needs |t| in (0, 1]");
    }
    const double cot = (1.0 + mag * mag) / (2.0 * mag) * std::tan(theta_prior);
    return {kPi / 2.0 - std::atan(cot), wrap_angle(-kPi / 2.0 - std::arg(t))};
}

/// One-parameter PPA family: rho(theta) = K U(theta + offset) rho_in U^dagger K^dagger / p.
struct PpaFamily {
    Generator generator;
    ComplexMatrix k_plus;
    DensityMatrix input;
    double phase_offset = 0.0;

    /// The qubit family in the analysis frame: A = sigma_x / 2, input
    /// v |0><0| + (1 - v) 1/2 and K+ = t |0><0| + |1><1|.
    static PpaFamily qubit(cplx t, double visibility) {
        if (!(visibility >= 0.0 && visibility <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "visibility must lie in [0, 1]");
        }
        ComplexMatrix in = visibility * outer(basis_vector(2, 0), basis_vector(2, 0)) +
                           (1.0 - visibility) * identity(2) / 2.0;
        return {Generator(pauli_x() / 2.0), make_filter(t).k_plus, DensityMatrix(in), 0.0};
    }

    ComplexMatrix evolved(double theta) const {
        const ComplexMatrix u = phase_unitary(generator, theta + phase_offset);
        return u * input.matrix() * u.adjoint();
    }

    ComplexMatrix unnormalized(double theta) const {
        return k_plus * evolved(theta) * k_plus.adjoint();
    }

    double probability(double theta) const {
        return unnormalized(theta).trace().real();
    }

    DensityMatrix state(double theta) const {
        const ComplexMatrix m = unnormalized(theta);
        const double p = m.trace().real();
        if (!(p >= 1e-15)) {
            throw Error(ErrorCode::zero_probability, "postselection probability below 1e-15");
        }
        return DensityMatrix(hermitize(m / p));
    }

    /// Analytic d rho / d theta, using dU/dtheta = i A U.
    ComplexMatrix derivative(double theta) const {
        const ComplexMatrix ev = evolved(theta);
        const ComplexMatrix &a = generator.matrix();
        const ComplexMatrix dev = cplx(0.0, 1.0) * (a * ev - ev * a);
        const ComplexMatrix m = k_plus * ev * k_plus.adjoint();
        const ComplexMatrix dm = k_plus * dev * k_plus.adjoint();
        const double p = m.trace().real();
        const double dp = dm.trace().real();
        return hermitize(dm / p - m * (dp / (p * p)));
    }
};

template <typename F>
concept AnalyticStateFamily = requires(const F &f, double x) {
    { f.state(x) } -> std::convertible_to<DensityMatrix>;
    { f.derivative(x) } -> std::convertible_to<ComplexMatrix>;
};

template <typename F>
concept StateFunction = requires(const F &f, double x) {
    { f(x) } -> std::convertible_to<DensityMatrix>;
};

namespace detail {

inline double two_outcome_cfi(double q, double dq) {
    if (!(q > 1e-12 && q < 1.0 - 1e-12)) {
        throw Error(ErrorCode::degenerate_measurement, "outcome probability is 0 or 1");
    }
    return dq * dq / (q * (1.0 - q));
}

}  // namespace detail

/// Classical Fisher information (q')^2 / (q (1 - q)) of the two-outcome
/// projective measurement along `direction`. Families with an analytic
/// derivative use it; plain state functions use a central difference.
template <typename Family>
    requires AnalyticStateFamily<Family> || StateFunction<Family>
double cfi(const MeasurementDirection &direction, const Family &family, double theta, double dtheta = 1e-5) {
    const ComplexMatrix proj = direction.projector();
    if constexpr (AnalyticStateFamily<Family>) {
        const DensityMatrix rho = family.state(theta);
        if (rho.dim() != 2) {
            throw Error(ErrorCode::dimension_mismatch, "cfi needs a qubit family");
        }
        const double q = (proj * rho.matrix()).trace().real();
        const double dq = (proj * family.derivative(theta)).trace().real();
        return detail::two_outcome_cfi(q, dq);
    } else {
        if (!(dtheta > 0.0)) {
            throw Error(ErrorCode::invalid_argument, "finite-difference step must be positive");
        }
        const DensityMatrix rho = family(theta);
        if (rho.dim() != 2) {
            throw Error(ErrorCode::dimension_mismatch, "cfi needs a qubit family");
        }
        const double q = (proj * rho.matrix()).trace().real();
        const double qp = (proj * family(theta + dtheta).matrix()).trace().real();
        const double qm = (proj * family(theta - dtheta).matrix()).trace().real();
        return detail::two_outcome_cfi(q, (qp - qm) / (2.0 * dtheta));
    }
}

/// Closed-form SLD of the visibility-v qubit PPA family in the library
/// frame,
///   Lambda = (v / p) [ -(1 - |t|^2)/2 sin(theta) 1
///                      + cos(theta) (Im t sigma_x + Re t sigma_y)
///                      - (1 + |t|^2)/2 sin(theta) sigma_z ],
/// with p = v p_ps(theta, |t|) + (1 - v)(1 + |t|^2)/2. For v < 1 this is
/// the unique SLD; for v = 1 it is the continuous limit, a valid SLD whose
/// eigenbasis is the optimal measurement.
inline ComplexMatrix sld_closed_form(double theta, cplx t, double visibility) {
    const double mag = std::abs(t);
    if (!(visibility > 0.0 && visibility <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "visibility must lie in (0, 1]");
    }
    if (!(mag > 0.0 && mag <= 1.0 + kRoundTripTol)) {
        throw Error(ErrorCode::invalid_argument, "|t| must lie in (0, 1]");
    }
    const double m2 = mag * mag;
    const double p = visibility * ppa_survival_probability(theta, mag) + (1.0 - visibility) * (1.0 + m2) / 2.0;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const ComplexMatrix body = -(1.0 - m2) / 2.0 * s * identity(2) + c * (t.imag() * pauli_x() + t.real() * pauli_y()) -
                               (1.0 + m2) / 2.0 * s * pauli_z();
    return visibility / p * body;
}

}  // namespace ppa
