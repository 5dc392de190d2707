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

/// Kirkwood-Dirac quasiprobabilities over ordered sequences of POVMs,
///   p(m1, ..., mk) = Tr(M^(k)_mk ... M^(1)_m1 rho),
/// with conditioning, marginalization, the nonclassicality gap and a
/// numerical check of the gap / postselected-QFI equality.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppa/errors.hpp"
#include "ppa/fisher.hpp"
#include "ppa/linalg.hpp"
#include "ppa/quantum_core.hpp"

namespace ppa {

/// Labelled POVM: positive-semidefinite elements resolving the identity.
class Povm {
public:
    Povm(std::vector<std::string> labels, std::vector<ComplexMatrix> elements)
        : labels_(std::move(labels)), elements_(std::move(elements)) {
        if (labels_.empty() || labels_.size() != elements_.size()) {
            throw Error(ErrorCode::invalid_argument, "POVM needs one label per element and at least one element");
        }
        const Index d = elements_.front().rows();
        ComplexMatrix total = ComplexMatrix::Zero(d, d);
        for (const auto &m : elements_) {
            if (m.rows() != d || m.cols() != d) {
                throw Error(ErrorCode::dimension_mismatch, "POVM elements differ in dimension");
            }
            if (hermitian_defect(m) > kStructuralTol || min_eigenvalue(m) < -kStructuralTol) {
                throw Error(ErrorCode::not_physical, "POVM element is not positive semidefinite");
            }
            total += m;
        }
        if ((total - identity(d)).cwiseAbs().maxCoeff() > kStructuralTol) {
            throw Error(ErrorCode::not_physical, "POVM elements do not sum to the identity");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            for (std::size_t j = i + 1; j < labels_.size(); ++j) {
                if (labels_[i] == labels_[j]) {
                    throw Error(ErrorCode::invalid_argument, "duplicate POVM label '" + labels_[i] + "'");
                }
            }
        }
    }

    Index dim() const {
        return elements_.front().rows();
    }

    std::size_t size() const {
        return elements_.size();
    }

    const std::vector<std::string> &labels() const {
        return labels_;
    }

    const std::vector<ComplexMatrix> &elements() const {
        return elements_;
    }

    std::size_t index_of(std::string_view label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == label) {
                return i;
            }
        }
        throw Error(ErrorCode::invalid_argument, "unknown POVM label '" + std::string(label) + "'");
    }

private:
    std::vector<std::string> labels_;
    std::vector<ComplexMatrix> elements_;
};

using PovmSequence = std::vector<Povm>;

/// Complex quasiprobabilities indexed by outcome tuples, stored row-major
/// (the first index varies slowest).
class KDDistribution {
public:
    KDDistribution(std::vector<std::vector<std::string>> labels, std::vector<cplx> values)
        : labels_(std::move(labels)), values_(std::move(values)) {
        std::size_t count = 1;
        for (const auto &axis : labels_) {
            if (axis.empty()) {
                throw Error(ErrorCode::invalid_argument, "distribution index with no outcomes");
            }
            count *= axis.size();
        }
        if (labels_.empty() || count != values_.size()) {
            throw Error(ErrorCode::dimension_mismatch, "distribution values do not match its shape");
        }
    }

    std::size_t arity() const {
        return labels_.size();
    }

    std::size_t size() const {
        return values_.size();
    }

    const std::vector<std::vector<std::string>> &labels() const {
        return labels_;
    }

    const std::vector<cplx> &values() const {
        return values_;
    }

    std::vector<std::size_t> shape() const {
        std::vector<std::size_t> s;
        for (const auto &axis : labels_) {
            s.push_back(axis.size());
        }
        return s;
    }

    std::size_t flat_index(std::span<const std::size_t> idx) const {
        if (idx.size() != arity()) {
            throw Error(ErrorCode::dimension_mismatch, "outcome tuple has the wrong arity");
        }
        std::size_t flat = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= labels_[k].size()) {
                throw Error(ErrorCode::invalid_argument, "outcome index out of range");
            }
            flat = flat * labels_[k].size() + idx[k];
        }
        return flat;
    }

    std::vector<std::size_t> unflatten(std::size_t flat) const {
        std::vector<std::size_t> idx(arity());
        for (std::size_t k = arity(); k-- > 0;) {
            idx[k] = flat % labels_[k].size();
            flat /= labels_[k].size();
        }
        return idx;
    }

    std::vector<std::string> outcome(std::size_t flat) const {
        const auto idx = unflatten(flat);
        std::vector<std::string> out;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out.push_back(labels_[k][idx[k]]);
        }
        return out;
    }

    cplx at(std::initializer_list<std::size_t> idx) const {
        return values_[flat_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    cplx at_labels(std::span<const std::string> outcome_labels) const {
        if (outcome_labels.size() != arity()) {
            throw Error(ErrorCode::dimension_mismatch, "outcome tuple has the wrong arity");
        }
        std::vector<std::size_t> idx;
        for (std::size_t k = 0; k < arity(); ++k) {
            idx.push_back(label_index(k, outcome_labels[k]));
        }
        return values_[flat_index(idx)];
    }

    std::size_t label_index(std::size_t axis, std::string_view label) const {
        const auto &names = labels_.at(axis);
        const auto it = std::find(names.begin(), names.end(), label);
        if (it == names.end()) {
            throw Error(ErrorCode::invalid_argument, "unknown outcome label '" + std::string(label) + "'");
        }
        return static_cast<std::size_t>(it - names.begin());
    }

    cplx sum() const {
        cplx s = 0.0;
        for (const auto &v : values_) {
            s += v;
        }
        return s;
    }

private:
    std::vector<std::vector<std::string>> labels_;
    std::vector<cplx> values_;
};

inline KDDistribution kd_distribution(const DensityMatrix &rho, const PovmSequence &seq) {
    if (seq.empty()) {
        throw Error(ErrorCode::invalid_argument, "empty POVM sequence");
    }
    std::vector<std::vector<std::string>> labels;
    for (const auto &povm : seq) {
        if (povm.dim() != rho.dim()) {
            throw Error(ErrorCode::dimension_mismatch, "POVM and state dimensions differ");
        }
        labels.push_back(povm.labels());
    }
    // Depth-first over the sequence, carrying the partial product M_l ... M_1 rho.
    std::vector<cplx> values;
    std::vector<ComplexMatrix> partial(seq.size() + 1);
    partial[0] = rho.matrix();
    auto recurse = [&](auto &self, std::size_t level) -> void {
        if (level == seq.size()) {
            values.push_back(partial[level].trace());
            return;
        }
        for (const auto &element : seq[level].elements()) {
            partial[level + 1] = element * partial[level];
            self(self, level + 1);
        }
    };
    recurse(recurse, 0);
    return KDDistribution(std::move(labels), std::move(values));
}

/// Sum of the quasiprobabilities whose `index`-th outcome is `label`.
inline cplx slice_weight(const KDDistribution &kd, std::size_t index, std::string_view label) {
    if (index >= kd.arity()) {
        throw Error(ErrorCode::invalid_argument, "distribution index out of range");
    }
    const std::size_t target = kd.label_index(index, label);
    cplx total = 0.0;
    for (std::size_t flat = 0; flat < kd.size(); ++flat) {
        if (kd.unflatten(flat)[index] == target) {
            total += kd.values()[flat];
        }
    }
    return total;
}

namespace detail {

inline std::vector<std::vector<std::string>> labels_without(const KDDistribution &kd, std::size_t index) {
    auto labels = kd.labels();
    labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(index));
    return labels;
}

inline std::size_t flat_without(const KDDistribution &kd, const std::vector<std::size_t> &idx, std::size_t index) {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k != index) {
            flat = flat * kd.labels()[k].size() + idx[k];
        }
    }
    return flat;
}

}  // namespace detail

/// Fixes the `index`-th outcome to `label`, removes that index and
/// renormalizes the slice to unit sum.
inline KDDistribution condition(const KDDistribution &kd, std::size_t index, std::string_view label) {
    if (kd.arity() < 2) {
        throw Error(ErrorCode::invalid_argument, "conditioning needs at least two indices");
    }
    const cplx norm = slice_weight(kd, index, label);
    if (!(std::abs(norm) > 1e-14)) {
        throw Error(ErrorCode::zero_probability, "conditioning slice has zero weight");
    }
    const std::size_t target = kd.label_index(index, label);
    auto labels = detail::labels_without(kd, index);
    std::size_t count = kd.size() / kd.labels()[index].size();
    std::vector<cplx> values(count, 0.0);
    for (std::size_t flat = 0; flat < kd.size(); ++flat) {
        const auto idx = kd.unflatten(flat);
        if (idx[index] == target) {
            values[detail::flat_without(kd, idx, index)] = kd.values()[flat] / norm;
        }
    }
    return KDDistribution(std::move(labels), std::move(values));
}

/// Sums over the `index`-th outcome.
inline KDDistribution marginalize(const KDDistribution &kd, std::size_t index) {
    if (kd.arity() < 2) {
        throw Error(ErrorCode::invalid_argument, "cannot marginalize a one-index distribution");
    }
    if (index >= kd.arity()) {
        throw Error(ErrorCode::invalid_argument, "distribution index out of range");
    }
    auto labels = detail::labels_without(kd, index);
    std::vector<cplx> values(kd.size() / kd.labels()[index].size(), 0.0);
    for (std::size_t flat = 0; flat < kd.size(); ++flat) {
        values[detail::flat_without(kd, kd.unflatten(flat), index)] += kd.values()[flat];
    }
    return KDDistribution(std::move(labels), std::move(values));
}

/// Keeps only the listed outcomes along `index` (no renormalization).
inline KDDistribution select(const KDDistribution &kd, std::size_t index, const std::vector<std::string> &keep) {
    if (index >= kd.arity()) {
        throw Error(ErrorCode::invalid_argument, "distribution index out of range");
    }
    std::vector<std::size_t> positions;
    for (const auto &label : keep) {
        positions.push_back(kd.label_index(index, label));
    }
    auto labels = kd.labels();
    labels[index] = keep;
    std::size_t count = 1;
    for (const auto &axis : labels) {
        count *= axis.size();
    }
    KDDistribution out(std::move(labels), std::vector<cplx>(count, 0.0));
    std::vector<cplx> values(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
        auto idx = out.unflatten(flat);
        idx[index] = positions[idx[index]];
        values[flat] = kd.values()[kd.flat_index(idx)];
    }
    return KDDistribution(out.labels(), std::move(values));
}

struct NonclassicalityGap {
    double gap = 0.0;
    std::vector<std::string> argmax_outcome;
    std::vector<std::string> argmin_outcome;
};

/// max |p|^2 - min |p|^2; ties resolve to the first outcome in storage order.
inline NonclassicalityGap nonclassicality_gap(const KDDistribution &kd) {
    std::size_t imax = 0;
    std::size_t imin = 0;
    for (std::size_t k = 1; k < kd.size(); ++k) {
        const double v = std::norm(kd.values()[k]);
        if (v > std::norm(kd.values()[imax])) {
            imax = k;
        }
        if (v < std::norm(kd.values()[imin])) {
            imin = k;
        }
    }
    return {std::norm(kd.values()[imax]) - std::norm(kd.values()[imin]), kd.outcome(imax), kd.outcome(imin)};
}

inline std::string format_eigenvalue(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value == 0.0 ? 0.0 : value);
    return buf;
}

/// Eigenprojectors of a generator as a POVM, largest eigenvalue first.
/// Default labels are the formatted eigenvalues.
inline Povm eigen_povm(const Generator &a, std::vector<std::string> labels = {}) {
    const auto values = a.eigenvalues();
    const std::size_t n = values.size();
    if (labels.empty()) {
        for (std::size_t k = n; k-- > 0;) {
            labels.push_back(format_eigenvalue(values[k]));
        }
    }
    if (labels.size() != n) {
        throw Error(ErrorCode::invalid_argument, "one label per eigenspace required");
    }
    std::vector<ComplexMatrix> elements;
    for (std::size_t k = n; k-- > 0;) {
        elements.push_back(a.projectors()[k]);
    }
    return Povm(std::move(labels), std::move(elements));
}

/// Random POVM with `outcomes` full-rank elements S^-1/2 G_k S^-1/2,
/// S = sum_k G_k, from Ginibre-generated G_k. Labels are "0", "1", ...
template <typename Rng>
Povm random_povm(Index dim, std::size_t outcomes, Rng &rng) {
    if (outcomes < 1) {
        throw Error(ErrorCode::invalid_argument, "POVM needs at least one outcome");
    }
    std::vector<ComplexMatrix> g;
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < outcomes; ++k) {
        g.push_back(random_density_matrix(dim, rng).matrix());
        total += g.back();
    }
    const ComplexMatrix inv_root = hermitian_function(total, [](double x) { return 1.0 / std::sqrt(x); });
    std::vector<std::string> labels;
    std::vector<ComplexMatrix> elements;
    for (std::size_t k = 0; k < outcomes; ++k) {
        labels.push_back(std::to_string(k));
        elements.push_back(hermitize(inv_root * g[k] * inv_root));
    }
    return Povm(std::move(labels), std::move(elements));
}

/// {K+^dagger K+, K-^dagger K-} labelled "+" and "-".
inline Povm filter_povm(const KrausPair &k) {
    return Povm({"+", "-"}, {hermitize(k.k_plus.adjoint() * k.k_plus), hermitize(k.k_minus.adjoint() * k.k_minus)});
}

/// (A eigenprojectors, filter effects, A eigenprojectors).
inline PovmSequence ppa_povm_sequence(const Generator &a, const KrausPair &k, std::vector<std::string> labels = {}) {
    Povm eig = eigen_povm(a, std::move(labels));
    return {eig, filter_povm(k), eig};
}

/// Conditional qubit table p(a, a' | +), index 0 = a+, 1 = a-.
using KdTable = std::array<std::array<cplx, 2>, 2>;

inline KdTable to_table(const KDDistribution &kd) {
    if (kd.arity() != 2 || kd.labels()[0].size() != 2 || kd.labels()[1].size() != 2) {
        throw Error(ErrorCode::dimension_mismatch, "expected a 2x2 distribution");
    }
    return {{{kd.at({0, 0}), kd.at({0, 1})}, {kd.at({1, 0}), kd.at({1, 1})}}};
}

inline KDDistribution from_table(const KdTable &table) {
    return KDDistribution({{"a+", "a-"}, {"a+", "a-"}}, {table[0][0], table[0][1], table[1][0], table[1][1]});
}

/// Conditional PPA distribution p(a, a' | +) for a qubit state rho and
/// filter amplitude t, with A = sigma_x / 2.
inline KdTable conditional_ppa_table(const DensityMatrix &rho, cplx t) {
    const Generator a(pauli_x() / 2.0);
    const KrausPair k = make_filter(t);
    const KDDistribution full = kd_distribution(rho, ppa_povm_sequence(a, k, {"a+", "a-"}));
    // Normalize by Tr(E rho) directly: summing the slice cancels O(1)
    // terms down to p and loses digits when p is small.
    const double p = (k.k_plus * rho.matrix() * k.k_plus.adjoint()).trace().real();
    if (!(p > 1e-14)) {
        throw Error(ErrorCode::zero_probability, "conditioning slice has zero weight");
    }
    KdTable table{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            table[i][j] = full.at({i, 0, j}) / p;
        }
    }
    return table;
}

/// Closed-form conditional PPA table for rho = |Psi(theta)><Psi(theta)|,
/// delta = 1: diagonals (1 + |t|^2) / (4 p), off-diagonals
/// exp(+-i theta) (|t|^2 - 1) / (4 p).
inline KdTable kd_table_closed_form(double theta, double t_mag) {
    const double p = ppa_survival_probability(theta, t_mag);
    if (!(p > 0.0)) {
        throw Error(ErrorCode::zero_probability, "postselection probability is zero");
    }
    const double m2 = t_mag * t_mag;
    const cplx diag = (1.0 + m2) / (4.0 * p);
    const double off = (m2 - 1.0) / (4.0 * p);
    return {{{diag, std::polar(1.0, theta) * off}, {std::polar(1.0, -theta) * off, diag}}};
}

struct GapEqualityResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    /// |Tr(Pi_max rho Pi_max E) - Tr(Pi_min rho Pi_min E)|.
    double diagonal_defect = 0.0;
};

/// Evaluates both sides of
///   I(theta) = 4 (a_max - a_min)^2 [max |p(a,a'|+)|^2 - min |p(a,a'|+)|^2]
/// for a pure state supported on exactly two eigenspaces of A, without
/// requiring the equal-diagonal condition.
inline GapEqualityResult evaluate_gap_equality(const DensityMatrix &rho, const Generator &a, const ComplexMatrix &k_plus) {
    if (rho.dim() != a.dim() || k_plus.rows() != a.dim() || k_plus.cols() != a.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "state, generator and Kraus operator dimensions differ");
    }
    if (rho.purity() < 1.0 - 1e-8) {
        throw Error(ErrorCode::not_pure, "gap equality needs a pure state");
    }
    std::vector<std::size_t> support;
    for (std::size_t k = 0; k < a.projectors().size(); ++k) {
        if ((a.projectors()[k] * rho.matrix()).trace().real() > 1e-12) {
            support.push_back(k);
        }
    }
    if (support.size() != 2) {
        throw Error(ErrorCode::precondition, "state must be supported on exactly two eigenspaces");
    }
    const ComplexMatrix &p_lo = a.projectors()[support[0]];
    const ComplexMatrix &p_hi = a.projectors()[support[1]];
    const double spread = a.eigenvalues()[support[1]] - a.eigenvalues()[support[0]];
    const ComplexMatrix effect = hermitize(k_plus.adjoint() * k_plus);
    const ComplexMatrix &r = rho.matrix();

    GapEqualityResult out;
    out.diagonal_defect =
        std::abs((p_hi * r * p_hi * effect).trace().real() - (p_lo * r * p_lo * effect).trace().real());
    out.lhs = qfi_postselected_pure(rho, a, k_plus);

    std::vector<std::string> labels{"max", "min"};
    std::vector<ComplexMatrix> elements{p_hi, p_lo};
    const ComplexMatrix rest = identity(a.dim()) - p_hi - p_lo;
    if (rest.norm() > kStructuralTol) {
        labels.push_back("rest");
        elements.push_back(rest);
    }
    const Povm eig(labels, elements);
    const KrausPair pair = KrausPair::from_success(k_plus);
    const KDDistribution full = kd_distribution(rho, {eig, filter_povm(pair), eig});
    const KDDistribution conditional = condition(full, 1, "+");
    const std::vector<std::string> keep{"max", "min"};
    const KDDistribution restricted = select(select(conditional, 0, keep), 1, keep);
    out.rhs = 4.0 * spread * spread * nonclassicality_gap(restricted).gap;
    out.residual = std::abs(out.lhs - out.rhs) / std::max(out.lhs, 1.0);
    return out;
}

/// As evaluate_gap_equality, but refuses to claim the equality when the
/// two diagonal quasiprobabilities differ by more than 1e-9.
inline GapEqualityResult verify_gap_equality(const DensityMatrix &rho, const Generator &a, const ComplexMatrix &k_plus) {
    const GapEqualityResult result = evaluate_gap_equality(rho, a, k_plus);
    if (result.diagonal_defect > 1e-9) {
        throw Error(ErrorCode::condition_not_met,
                    "diagonal quasiprobabilities differ; residual " + std::to_string(result.residual));
    }
    return result;
}

struct GapInstance {
    DensityMatrix rho;
    Generator generator;
    ComplexMatrix k_plus;
};

/// Qubit PPA instance: theta in (0.01, 3.1), |t| in (0.01, 1], random
/// phase of t.
template <typename Rng>
GapInstance random_qubit_gap_instance(Rng &rng) {
    std::uniform_real_distribution<double> theta_dist(0.01, 3.1);
    std::uniform_real_distribution<double> mag_dist(0.01, 1.0);
    std::uniform_real_distribution<double> phase_dist(-kPi, kPi);
    const double theta = theta_dist(rng);
    const double mag = std::nextafter(mag_dist(rng), 2.0);
    const cplx t = std::polar(mag, phase_dist(rng));
    const Generator a(pauli_x() / 2.0);
    const DensityMatrix rho = evolve(DensityMatrix::pure(basis_vector(2, 0)), phase_unitary(a, theta));
    return {rho, a, make_filter(t).k_plus};
}

/// Qudit instance of dimension `dim` satisfying the equal-diagonal
/// condition by construction: integer spectrum in [-3, 3] with distinct
/// extremes, input (|a_max> + |a_min>)/sqrt(2), and E = K+^dagger K+ a
/// random-unitary conjugate of a diagonal matrix whose larger diagonal
/// weight on {|a_max>, |a_min>} is rescaled down to match the smaller.
template <typename Rng>
GapInstance random_qudit_gap_instance(Rng &rng, Index dim) {
    if (dim < 2) {
        throw Error(ErrorCode::invalid_argument, "qudit dimension must be at least 2");
    }
    std::uniform_int_distribution<int> eig_dist(-3, 3);
    Eigen::VectorXd spectrum(dim);
    do {
        for (Index k = 0; k < dim; ++k) {
            spectrum(k) = eig_dist(rng);
        }
    } while (spectrum.maxCoeff() == spectrum.minCoeff());
    Index i_max = 0;
    Index i_min = 0;
    spectrum.maxCoeff(&i_max);
    spectrum.minCoeff(&i_min);

    const ComplexMatrix v = random_unitary(dim, rng);
    const Generator a(v * spectrum.cast<cplx>().asDiagonal() * v.adjoint());
    const ComplexVector v_max = v.col(i_max);
    const ComplexVector v_min = v.col(i_min);

    std::uniform_real_distribution<double> theta_dist(0.0, 2.0 * kPi);
    const DensityMatrix rho =
        evolve(DensityMatrix::pure((v_max + v_min) / std::sqrt(2.0)), phase_unitary(a, theta_dist(rng)));

    std::uniform_real_distribution<double> weight_dist(0.05, 1.0);
    Eigen::VectorXd weights(dim);
    for (Index k = 0; k < dim; ++k) {
        weights(k) = weight_dist(rng);
    }
    const ComplexMatrix w = random_unitary(dim, rng);
    ComplexMatrix effect = w * weights.cast<cplx>().asDiagonal() * w.adjoint();
    const double s_max = (v_max.adjoint() * effect * v_max)(0, 0).real();
    const double s_min = (v_min.adjoint() * effect * v_min)(0, 0).real();
    const ComplexVector &big = s_max > s_min ? v_max : v_min;
    const double scale = std::sqrt(std::min(s_max, s_min) / std::max(s_max, s_min));
    const ComplexMatrix shrink = identity(dim) + (scale - 1.0) * outer(big, big);
    effect = hermitize(shrink * effect * shrink);

    const ComplexMatrix k_plus = random_unitary(dim, rng) * psd_sqrt(effect);
    return {rho, a, k_plus};
}

}  // namespace ppa
