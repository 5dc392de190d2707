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

/// Grid drivers behind the command-line tool: estimation sweeps,
/// quasiprobability datasets, tomography-based information datasets and
/// the invariant verification suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ppa/errors.hpp"
#include "ppa/experiment.hpp"
#include "ppa/fisher.hpp"
#include "ppa/parallel.hpp"
#include "ppa/quantum_core.hpp"
#include "ppa/quasiprob.hpp"
#include "ppa/rng.hpp"
#include "ppa/tomography.hpp"

namespace ppa {

inline const std::vector<double> kDefaultThetas{0.02, 0.04, 0.1, 0.2, 0.5, 1.0, 1.5};
inline const std::vector<double> kDefaultTs{0.044, 0.082, 0.15, 0.3, 0.5, 1.0};

/// "%.12g" in the C locale; non-finite values print as nan / inf / -inf.
inline std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

struct SweepSpec {
    std::vector<double> theta_list = kDefaultThetas;
    std::vector<double> t_list = kDefaultTs;
    double visibility = 1.0;
    double epsilon = 0.0;
    double delta_t = 0.0;
    std::uint64_t photon_budget = 1000000;
    SamplingMode sampling_mode = SamplingMode::fixed;
    int n_trials = 32;
    std::uint64_t seed = 0;
    std::string output_path;

    void validate() const {
        if (theta_list.empty() || t_list.empty()) {
            throw Error(ErrorCode::invalid_argument, "theta_list and t_list must be nonempty");
        }
    }

    /// Bench configuration of grid point `index` (theta-major order).
    BenchConfig point(std::size_t index) const {
        BenchConfig cfg;
        cfg.theta_true = theta_list.at(index / t_list.size());
        cfg.t_set = t_list.at(index % t_list.size());
        cfg.visibility = visibility;
        cfg.epsilon = epsilon;
        cfg.delta_t = delta_t;
        cfg.photon_budget = photon_budget;
        cfg.sampling_mode = sampling_mode;
        cfg.n_trials = n_trials;
        cfg.seed = derive_seed(seed, index, StreamTag::grid);
        return cfg;
    }

    std::size_t size() const {
        return theta_list.size() * t_list.size();
    }
};

/// One record per (theta, t), theta-major. Grid points run in order; the
/// trials inside each point use the worker pool.
inline std::vector<SweepRecord> run_sweep(const SweepSpec &spec, unsigned workers = 0) {
    spec.validate();
    std::vector<SweepRecord> out;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out.push_back(run_trials(spec.point(i), workers));
    }
    return out;
}

inline constexpr const char *kSweepHeader =
    "theta_true,t_mag,mean_estimate,variance,mse,mean_detected,precision_per_photon,accuracy_per_photon,"
    "qfi_theory,stderr_variance,flags";

inline std::string sweep_csv(const std::vector<SweepRecord> &records) {
    std::string out = std::string(kSweepHeader) + "\n";
    for (const auto &r : records) {
        for (const double x : {r.theta_true, r.t_mag, r.mean_estimate, r.variance, r.mse, r.mean_detected,
                               r.precision_per_photon, r.accuracy_per_photon, r.qfi_theory, r.stderr_variance}) {
            out += format_number(x) + ",";
        }
        out += join_flags(r.flags) + "\n";
    }
    return out;
}

struct KdPoint {
    double theta = 0.0;
    double t_mag = 0.0;
    KdTable table{};
    double gap = 0.0;
    /// 4 delta^2 gap with delta = 1.
    double four_gap = 0.0;
    double qfi_theory = 0.0;
    cplx sum = 0.0;
};

/// Conditional tables on the (theta, t) grid, from the exact pure state or,
/// with tomography_shots > 0, from a simulated tomographic estimate of it.
inline std::vector<KdPoint> run_kd(const std::vector<double> &thetas, const std::vector<double> &ts,
                                   std::uint64_t tomography_shots = 0, std::uint64_t seed = 0,
                                   unsigned workers = 0) {
    if (thetas.empty() || ts.empty()) {
        throw Error(ErrorCode::invalid_argument, "theta and t lists must be nonempty");
    }
    std::vector<KdPoint> out(thetas.size() * ts.size());
    parallel_for(out.size(), workers, [&](std::size_t i) {
        KdPoint pt;
        pt.theta = thetas[i / ts.size()];
        pt.t_mag = ts[i % ts.size()];
        DensityMatrix rho = PpaFamily::qubit(1.0, 1.0).state(pt.theta);
        if (tomography_shots > 0) {
            Stream rng = make_stream(seed, i, StreamTag::tomography);
            rho = simulate_tomography(rho, tomography_shots, rng).rho_est;
        }
        pt.table = kd_from_tomography(rho, pt.t_mag);
        pt.gap = nonclassicality_gap(from_table(pt.table)).gap;
        pt.four_gap = 4.0 * pt.gap;
        pt.qfi_theory = qfi_ppa_theory(pt.theta, pt.t_mag);
        pt.sum = pt.table[0][0] + pt.table[0][1] + pt.table[1][0] + pt.table[1][1];
        out[i] = pt;
    });
    return out;
}

struct Fig4Spec {
    std::vector<double> theta_list = kDefaultThetas;
    std::vector<double> t_list = kDefaultTs;
    double visibility = 1.0;
    std::uint64_t shots_per_basis = 100000;
    int runs = 4;
    double dtheta = kDefaultSlopeStep;
    std::uint64_t seed = 0;
    std::string output_path;
};

struct Fig4Point {
    double theta = 0.0;
    double t_mag = 0.0;
    double empirical_qfi = 0.0;
    double empirical_qfi_stderr = 0.0;
    double qfi_theory = 0.0;
    double four_gap = 0.0;
    double four_gap_stderr = 0.0;
    /// Survival probability estimated from the unpostselected tomography.
    double p_hat = 0.0;
    double empirical_qfi_per_input = 0.0;
    double qfi_theory_per_input = 0.0;
    double four_gap_per_input = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_stderr(const std::vector<double> &xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const double x : xs) {
        mean += x;
    }
    mean /= n;
    if (xs.size() < 2) {
        return {mean, std::numeric_limits<double>::quiet_NaN()};
    }
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Per (theta, t) and per repetition: tomography of the postselected state
/// at theta - d, theta, theta + d gives an empirical QFI; tomography of the
/// unpostselected state gives the conditional table, its 4 x gap and the
/// survival probability used for per-input-photon values.
inline std::vector<Fig4Point> run_fig4(const Fig4Spec &spec, unsigned workers = 0) {
    if (spec.theta_list.empty() || spec.t_list.empty()) {
        throw Error(ErrorCode::invalid_argument, "theta_list and t_list must be nonempty");
    }
    if (spec.runs < 1) {
        throw Error(ErrorCode::invalid_argument, "runs must be positive");
    }
    const std::size_t points = spec.theta_list.size() * spec.t_list.size();
    const auto runs = static_cast<std::size_t>(spec.runs);
    std::vector<double> qfi(points * runs);
    std::vector<double> gap(points * runs);
    std::vector<double> phat(points * runs);
    parallel_for(points * runs, workers, [&](std::size_t job) {
        const std::size_t i = job / runs;
        const double theta = spec.theta_list[i / spec.t_list.size()];
        const double t = spec.t_list[i % spec.t_list.size()];
        Stream rng = make_stream(derive_seed(spec.seed, i, StreamTag::grid), job % runs, StreamTag::tomography);
        const PpaFamily post = PpaFamily::qubit(t, spec.visibility);
        const DensityMatrix minus = simulate_tomography(post.state(theta - spec.dtheta), spec.shots_per_basis, rng).rho_est;
        const DensityMatrix zero = simulate_tomography(post.state(theta), spec.shots_per_basis, rng).rho_est;
        const DensityMatrix plus = simulate_tomography(post.state(theta + spec.dtheta), spec.shots_per_basis, rng).rho_est;
        qfi[job] = empirical_qfi(zero, rho_derivative(minus, zero, plus, spec.dtheta));

        const DensityMatrix unpost =
            simulate_tomography(PpaFamily::qubit(1.0, spec.visibility).state(theta), spec.shots_per_basis, rng).rho_est;
        gap[job] = 4.0 * nonclassicality_gap(from_table(kd_from_tomography(unpost, t))).gap;
        const ComplexMatrix k = make_filter(t).k_plus;
        phat[job] = (k * unpost.matrix() * k.adjoint()).trace().real();
    });

    std::vector<Fig4Point> out;
    for (std::size_t i = 0; i < points; ++i) {
        Fig4Point pt;
        pt.theta = spec.theta_list[i / spec.t_list.size()];
        pt.t_mag = spec.t_list[i % spec.t_list.size()];
        const auto slice = [&](const std::vector<double> &v) {
            return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i * runs),
                                       v.begin() + static_cast<std::ptrdiff_t>((i + 1) * runs));
        };
        std::tie(pt.empirical_qfi, pt.empirical_qfi_stderr) = detail::mean_and_stderr(slice(qfi));
        std::tie(pt.four_gap, pt.four_gap_stderr) = detail::mean_and_stderr(slice(gap));
        pt.p_hat = detail::mean_and_stderr(slice(phat)).first;
        pt.qfi_theory = qfi_ppa_theory(pt.theta, pt.t_mag);
        pt.empirical_qfi_per_input = pt.empirical_qfi * pt.p_hat;
        pt.qfi_theory_per_input = pt.qfi_theory * ppa_survival_probability(pt.theta, pt.t_mag);
        pt.four_gap_per_input = pt.four_gap * pt.p_hat;
        out.push_back(pt);
    }
    return out;
}

inline constexpr const char *kFig4Header =
    "theta,t_mag,empirical_qfi,empirical_qfi_stderr,qfi_theory,four_gap,four_gap_stderr,p_hat,"
    "empirical_qfi_per_input,qfi_theory_per_input,four_gap_per_input";

inline std::string fig4_csv(const std::vector<Fig4Point> &points) {
    std::string out = std::string(kFig4Header) + "\n";
    for (const auto &p : points) {
        const double row[] = {p.theta,    p.t_mag,          p.empirical_qfi,           p.empirical_qfi_stderr,
                              p.qfi_theory, p.four_gap,     p.four_gap_stderr,         p.p_hat,
                              p.empirical_qfi_per_input,    p.qfi_theory_per_input,    p.four_gap_per_input};
        for (std::size_t k = 0; k < std::size(row); ++k) {
            out += format_number(row[k]) + (k + 1 < std::size(row) ? "," : "\n");
        }
    }
    return out;
}

struct SuiteResult {
    std::string name;
    std::size_t instances = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string failure;
};

struct VerificationReport {
    std::vector<SuiteResult> suites;

    bool passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult &s) { return s.passed; });
    }
};

namespace detail {

/// Runs `count` keyed instances of `residual(i, rng)` and keeps the worst.
template <typename F>
SuiteResult run_suite(std::string name, double tolerance, std::size_t count, std::uint64_t seed, std::uint64_t suite_id,
                      unsigned workers, F &&residual) {
    std::vector<double> values(count, 0.0);
    std::vector<std::string> errors(count);
    parallel_for(count, workers, [&](std::size_t i) {
        Stream rng = make_stream(derive_seed(seed, suite_id, StreamTag::instance), i, StreamTag::instance);
        try {
            values[i] = residual(i, rng);
        } catch (const Error &e) {
            values[i] = std::numeric_limits<double>::infinity();
            errors[i] = e.what();
        }
    });
    SuiteResult out{std::move(name), count, 0.0, tolerance, true, {}};
    for (std::size_t i = 0; i < count; ++i) {
        if (!(values[i] <= out.max_residual)) {
            out.max_residual = values[i];
        }
        if (!errors[i].empty() && out.failure.empty()) {
            out.failure = "instance " + std::to_string(i) + ": " + errors[i];
        }
    }
    out.passed = out.max_residual <= tolerance;
    return out;
}

inline double relative_gap(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace detail

/// Invariant suites; `instances` sets the size of the randomized ones
/// (qubit gap instances; a fifth as many qudit instances; a tenth as many
/// random POVM sequences).
inline VerificationReport run_verification(std::uint64_t seed, std::size_t instances, unsigned workers = 0) {
    VerificationReport report;
    const std::size_t grid = kDefaultThetas.size() * kDefaultTs.size();
    const auto grid_point = [&](std::size_t i) {
        return std::pair{kDefaultThetas[i / kDefaultTs.size()], kDefaultTs[i % kDefaultTs.size()]};
    };

    report.suites.push_back(detail::run_suite("gap_equality_qubit", 1e-9, instances, seed, 1, workers,
                                              [](std::size_t, Stream &rng) {
                                                  const GapInstance g = random_qubit_gap_instance(rng);
                                                  return verify_gap_equality(g.rho, g.generator, g.k_plus).residual;
                                              }));
    report.suites.push_back(detail::run_suite("gap_equality_qudit", 1e-9, std::max<std::size_t>(instances / 5, 1),
                                              seed, 2, workers, [](std::size_t i, Stream &rng) {
                                                  const auto dim = static_cast<Index>(2 + i % 5);
                                                  const GapInstance g = random_qudit_gap_instance(rng, dim);
                                                  return verify_gap_equality(g.rho, g.generator, g.k_plus).residual;
                                              }));
    report.suites.push_back(detail::run_suite(
        "kd_marginalization", 1e-12, std::max<std::size_t>(instances / 10, 1), seed, 3, workers,
        [](std::size_t i, Stream &rng) {
            const auto dim = static_cast<Index>(2 + i % 3);
            const DensityMatrix rho = random_density_matrix(dim, rng);
            const PovmSequence seq{random_povm(dim, 2, rng), random_povm(dim, 3, rng), random_povm(dim, 2, rng)};
            const KDDistribution full = kd_distribution(rho, seq);
            double worst = 0.0;
            for (std::size_t k = 0; k < seq.size(); ++k) {
                PovmSequence reduced = seq;
                reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
                const KDDistribution expect = kd_distribution(rho, reduced);
                const KDDistribution got = marginalize(full, k);
                for (std::size_t j = 0; j < got.size(); ++j) {
                    worst = std::max(worst, std::abs(got.values()[j] - expect.values()[j]));
                }
            }
            return worst;
        }));
    report.suites.push_back(detail::run_suite("kd_normalization", 1e-10, std::max<std::size_t>(instances / 10, 1),
                                              seed, 4, workers, [](std::size_t i, Stream &rng) {
                                                  const auto dim = static_cast<Index>(2 + i % 3);
                                                  const DensityMatrix rho = random_density_matrix(dim, rng);
                                                  const PovmSequence seq{random_povm(dim, 3, rng),
                                                                         random_povm(dim, 2, rng),
                                                                         random_povm(dim, 4, rng)};
                                                  return std::abs(kd_distribution(rho, seq).sum() - 1.0);
                                              }));
    report.suites.push_back(detail::run_suite("kd_table_closed_form", 1e-12, grid, seed, 5, workers,
                                              [&](std::size_t i, Stream &) {
                                                  const auto [theta, t] = grid_point(i);
                                                  const DensityMatrix rho = PpaFamily::qubit(1.0, 1.0).state(theta);
                                                  const KdTable got = conditional_ppa_table(rho, t);
                                                  const KdTable want = kd_table_closed_form(theta, t);
                                                  double worst = 0.0;
                                                  for (int a = 0; a < 2; ++a) {
                                                      for (int b = 0; b < 2; ++b) {
                                                          worst = std::max(worst, std::abs(got[a][b] - want[a][b]));
                                                      }
                                                  }
                                                  return worst;
                                              }));
    report.suites.push_back(detail::run_suite(
        "qfi_consistency", 1e-8, grid, seed, 6, workers, [&](std::size_t i, Stream &) {
            const auto [theta, t] = grid_point(i);
            const PpaFamily family = PpaFamily::qubit(t, 1.0);
            const double theory = qfi_ppa_theory(theta, t);
            const double pure =
                qfi_postselected_pure(DensityMatrix(hermitize(family.evolved(theta))), family.generator, family.k_plus);
            const double numeric = sld(family.state(theta), family.derivative(theta)).qfi;
            return std::max({detail::relative_gap(pure, theory), detail::relative_gap(numeric, theory),
                             detail::relative_gap(numeric, pure)});
        }));
    report.suites.push_back(detail::run_suite(
        "cfi_equals_qfi", 1e-8, 2 * grid, seed, 7, workers, [&](std::size_t i, Stream &) {
            const auto [theta, t] = grid_point(i % grid);
            const double v = i < grid ? 1.0 : 0.98;
            const PpaFamily family = PpaFamily::qubit(t, v);
            const double q = v == 1.0 ? qfi_ppa_theory(theta, t) : sld(family.state(theta), family.derivative(theta)).qfi;
            return detail::relative_gap(cfi(optimal_measurement(theta, t), family, theta), q);
        }));
    report.suites.push_back(detail::run_suite(
        "sld_axis", 1e-8, 2 * grid, seed, 8, workers, [&](std::size_t i, Stream &) {
            const auto [theta, t] = grid_point(i % grid);
            const double v = i < grid ? 1.0 : 0.98;
            const PpaFamily family = PpaFamily::qubit(t, v);
            const ComplexMatrix lambda =
                v == 1.0 ? sld_closed_form(theta, t, v) : sld(family.state(theta), family.derivative(theta)).lambda;
            return axis_angle(operator_axis(lambda), optimal_measurement(theta, t).axis());
        }));
    report.suites.push_back(detail::run_suite(
        "sylvester_residual", 1e-8, 2 * grid, seed, 9, workers, [&](std::size_t i, Stream &) {
            const auto [theta, t] = grid_point(i % grid);
            const double v = i < grid ? 1.0 : 0.98;
            const PpaFamily family = PpaFamily::qubit(t, v);
            const DensityMatrix rho = family.state(theta);
            const ComplexMatrix drho = family.derivative(theta);
            const ComplexMatrix closed = sld_closed_form(theta, t, v);
            const double closed_residual =
                (drho - (closed * rho.matrix() + rho.matrix() * closed) / 2.0).norm() / std::max(drho.norm(), 1.0);
            return std::max(sld(rho, drho).residual / std::max(drho.norm(), 1.0), closed_residual);
        }));
    return report;
}

}  // namespace ppa
