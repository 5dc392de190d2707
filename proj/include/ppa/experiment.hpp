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

/// Virtual polarimetry bench: mixed source, tilted waveplate, partial
/// polarizer, projective detection with photon-count sampling, maximum
/// likelihood phase estimation and the systematic-error models for a
/// miscalibrated filter and a misaligned waveplate.
///
/// The bench source emits v|1><1| + (1 - v)/2 and the waveplate applies
/// exp(i (theta - pi) A(eps)). For eps = 0 that is exactly the analysis
/// frame of fisher.hpp up to a global phase.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ppa/errors.hpp"
#include "ppa/fisher.hpp"
#include "ppa/linalg.hpp"
#include "ppa/parallel.hpp"
#include "ppa/quantum_core.hpp"
#include "ppa/rng.hpp"

namespace ppa {

enum class SamplingMode { fixed, poisson };

inline std::string to_string(SamplingMode mode) {
    return mode == SamplingMode::fixed ? "fixed" : "poisson";
}

inline SamplingMode sampling_mode_from_string(const std::string &s) {
    if (s == "fixed") {
        return SamplingMode::fixed;
    }
    if (s == "poisson") {
        return SamplingMode::poisson;
    }
    throw Error(ErrorCode::invalid_argument, "unknown sampling mode '" + s + "'");
}

struct BenchConfig {
    double theta_true = 0.0;
    /// Filter amplitude actually installed on the bench.
    cplx t_set = 1.0;
    /// Calibration error: the estimator believes the filter amplitude is
    /// |t_set| + delta_t (phase of t_set kept).
    double delta_t = 0.0;
    double epsilon = 0.0;
    double visibility = 1.0;
    std::uint64_t photon_budget = 0;
    SamplingMode sampling_mode = SamplingMode::fixed;
    int n_trials = 32;
    std::uint64_t seed = 0;

    cplx t_assumed() const {
        const double mag = std::abs(t_set) + delta_t;
        return std::abs(t_set) > 0.0 ? t_set / std::abs(t_set) * mag : cplx(mag);
    }

    void validate() const {
        const double mag = std::abs(t_set);
        if (!std::isfinite(theta_true) || !std::isfinite(mag) || !std::isfinite(delta_t)) {
            throw Error(ErrorCode::invalid_argument, "non-finite bench parameter");
        }
        if (!(mag <= 1.0 + kRoundTripTol)) {
            throw Error(ErrorCode::invalid_argument, "|t_set| must lie in [0, 1]");
        }
        if (!(mag + delta_t >= 0.0 && mag + delta_t <= 1.0 + kRoundTripTol)) {
            throw Error(ErrorCode::invalid_argument, "|t_set| + delta_t must lie in [0, 1]");
        }
        if (!(visibility > 0.0 && visibility <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "visibility must lie in (0, 1]");
        }
        if (!(std::abs(epsilon) < kPi / 4.0)) {
            throw Error(ErrorCode::invalid_argument, "|epsilon| must be below pi/4");
        }
        if (n_trials < 1) {
            throw Error(ErrorCode::invalid_argument, "n_trials must be positive");
        }
    }
};

/// v|1><1| + (1 - v) 1/2.
inline DensityMatrix source_state(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "visibility must lie in [0, 1]");
    }
    const ComplexVector one = basis_vector(2, 1);
    return DensityMatrix(visibility * outer(one, one) + (1.0 - visibility) * identity(2) / 2.0);
}

/// A(eps) = cos(2 eps) sigma_x / 2 + sin(2 eps) sigma_z / 2.
inline Generator waveplate_generator(double epsilon) {
    return Generator(std::cos(2.0 * epsilon) * pauli_x() / 2.0 + std::sin(2.0 * epsilon) * pauli_z() / 2.0);
}

inline PpaFamily bench_family(const BenchConfig &cfg) {
    cfg.validate();
    return {waveplate_generator(cfg.epsilon), make_filter(cfg.t_set).k_plus, source_state(cfg.visibility), -kPi};
}

/// Postselected state and survival probability at cfg.theta_true.
inline Postselected run_bench_state(const BenchConfig &cfg) {
    const PpaFamily family = bench_family(cfg);
    const ComplexMatrix m = family.unnormalized(cfg.theta_true);
    const double p = m.trace().real();
    if (!(p >= 1e-15)) {
        throw Error(ErrorCode::zero_probability, "postselection probability below 1e-15");
    }
    return {DensityMatrix(hermitize(m / p)), p};
}

struct TrialResult {
    double theta_estimate = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t n_detected = 0;
    std::uint64_t counts_plus = 0;
    std::uint64_t counts_minus = 0;
    bool clamped = false;
};

inline double outcome_probability(const DensityMatrix &rho, const MeasurementDirection &direction) {
    return std::clamp((direction.projector() * rho.matrix()).trace().real(), 0.0, 1.0);
}

/// Detected photons ~ Binomial(budget, p) or Poisson(budget p); "+"
/// outcomes ~ Binomial(detected, q).
template <typename Rng>
TrialResult sample_counts(const DensityMatrix &rho_ps, double p_ps, const MeasurementDirection &direction,
                          std::uint64_t budget, SamplingMode mode, Rng &rng) {
    if (!(p_ps >= 0.0 && p_ps <= 1.0 + kRoundTripTol)) {
        throw Error(ErrorCode::invalid_argument, "survival probability outside [0, 1]");
    }
    const double p = std::min(p_ps, 1.0);
    TrialResult out;
    if (budget == 0 || p == 0.0) {
        return out;
    }
    if (mode == SamplingMode::fixed) {
        out.n_detected = std::binomial_distribution<std::uint64_t>(budget, p)(rng);
    } else {
        out.n_detected = std::poisson_distribution<std::uint64_t>(static_cast<double>(budget) * p)(rng);
    }
    if (out.n_detected > 0) {
        const double q = outcome_probability(rho_ps, direction);
        out.counts_plus = std::binomial_distribution<std::uint64_t>(out.n_detected, q)(rng);
    }
    out.counts_minus = out.n_detected - out.counts_plus;
    return out;
}

struct ThetaEstimate {
    double theta = 0.0;
    double amplified = 0.0;
    bool clamped = false;
};

/// Closed-form maximum-likelihood inversion of the "+" frequency.
///
/// The model is the ideal pure postselected state with Bloch vector
/// (sin T cos phi_s, sin T sin phi_s, cos T), phi_s = pi/2 - arg t, so
/// q(T) = (1 + R cos(T - beta)) / 2. Of the two solutions per period the
/// one nearest the amplified prior is kept, then the amplification is
/// inverted with t_assumed.
inline ThetaEstimate estimate_theta(const TrialResult &counts, cplx t_assumed, const MeasurementDirection &direction,
                                    double theta_prior) {
    if (counts.n_detected == 0) {
        throw Error(ErrorCode::no_data, "no detected photons");
    }
    const double mag = std::abs(t_assumed);
    if (!(mag > 0.0 && mag <= 1.0 + kRoundTripTol)) {
        throw Error(ErrorCode::invalid_argument, "assumed |t| must lie in (0, 1]");
    }
    const double n = static_cast<double>(counts.n_detected);
    double f = static_cast<double>(counts.counts_plus) / n;
    ThetaEstimate out;
    if (counts.counts_plus == 0) {
        f = 0.5 / n;
        out.clamped = true;
    } else if (counts.counts_plus == counts.n_detected) {
        f = 1.0 - 0.5 / n;
        out.clamped = true;
    }

    const BlochVector axis = direction.axis();
    const double phi_s = kPi / 2.0 - std::arg(t_assumed);
    const double a = axis.x * std::cos(phi_s) + axis.y * std::sin(phi_s);
    const double b = axis.z;
    const double r = std::hypot(a, b);
    if (!(r > 1e-12)) {
        throw Error(ErrorCode::degenerate_measurement, "measurement axis is orthogonal to the state plane");
    }
    const double beta = std::atan2(a, b);
    double c = (2.0 * f - 1.0) / r;
    if (c > 1.0 || c < -1.0) {
        c = std::clamp(c, -1.0, 1.0);
        out.clamped = true;
    }
    const double prior = amplified_angle(std::clamp(theta_prior, -kPi + 1e-12, kPi - 1e-12), std::min(mag, 1.0));
    const double spread = std::acos(c);
    double best = 0.0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const double candidate : {beta + spread, beta - spread}) {
        const double shifted = prior + wrap_angle(candidate - prior);
        const double distance = std::abs(shifted - prior);
        if (distance < best_distance) {
            best_distance = distance;
            best = shifted;
        }
    }
    out.amplified = best;
    out.theta = deamplified_angle(best, std::min(mag, 1.0));
    return out;
}

struct SweepRecord {
    double theta_true = 0.0;
    double t_mag = 0.0;
    double mean_estimate = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    double mean_detected = 0.0;
    double precision_per_photon = std::numeric_limits<double>::quiet_NaN();
    double accuracy_per_photon = std::numeric_limits<double>::quiet_NaN();
    double qfi_theory = std::numeric_limits<double>::quiet_NaN();
    double stderr_variance = std::numeric_limits<double>::quiet_NaN();
    int n_valid = 0;
    /// Subset of {"no_data", "partial", "clamped"}.
    std::vector<std::string> flags;
};

inline std::string join_flags(const std::vector<std::string> &flags) {
    std::string out;
    for (const auto &f : flags) {
        out += out.empty() ? f : "|" + f;
    }
    return out;
}

/// Runs cfg.n_trials independent trials, each on its own keyed stream,
/// and aggregates them in trial order. The measurement direction is the
/// optimal one for (theta_true, t_assumed). Trials with no detection are
/// skipped and flagged.
inline SweepRecord run_trials(const BenchConfig &cfg, unsigned workers = 0) {
    cfg.validate();
    if (cfg.n_trials < 2) {
        throw Error(ErrorCode::invalid_argument, "run_trials needs at least two trials");
    }
    const cplx t_assumed = cfg.t_assumed();
    const Postselected bench = run_bench_state(cfg);
    const MeasurementDirection direction = optimal_measurement(cfg.theta_true, t_assumed);

    const auto n = static_cast<std::size_t>(cfg.n_trials);
    std::vector<TrialResult> trials(n);
    parallel_for(n, workers, [&](std::size_t i) {
        Stream rng = make_stream(cfg.seed, i, StreamTag::detection);
        TrialResult trial =
            sample_counts(bench.state, bench.probability, direction, cfg.photon_budget, cfg.sampling_mode, rng);
        if (trial.n_detected > 0) {
            const ThetaEstimate est = estimate_theta(trial, t_assumed, direction, cfg.theta_true);
            trial.theta_estimate = est.theta;
            trial.clamped = est.clamped;
        }
        trials[i] = trial;
    });

    SweepRecord rec;
    rec.theta_true = cfg.theta_true;
    rec.t_mag = std::abs(cfg.t_set);
    if (rec.t_mag > 0.0) {
        rec.qfi_theory = qfi_ppa_theory(cfg.theta_true, rec.t_mag);
    }
    double detected = 0.0;
    double sum = 0.0;
    bool clamped = false;
    for (const auto &trial : trials) {
        detected += static_cast<double>(trial.n_detected);
        if (trial.n_detected > 0) {
            sum += trial.theta_estimate;
            ++rec.n_valid;
            clamped = clamped || trial.clamped;
        }
    }
    rec.mean_detected = detected / static_cast<double>(n);
    if (rec.n_valid == 0) {
        rec.flags.push_back("no_data");
        return rec;
    }
    if (rec.n_valid < cfg.n_trials) {
        rec.flags.push_back("partial");
    }
    if (clamped) {
        rec.flags.push_back("clamped");
    }
    rec.mean_estimate = sum / rec.n_valid;
    double sq_dev = 0.0;
    double sq_err = 0.0;
    for (const auto &trial : trials) {
        if (trial.n_detected > 0) {
            sq_dev += (trial.theta_estimate - rec.mean_estimate) * (trial.theta_estimate - rec.mean_estimate);
            sq_err += (trial.theta_estimate - cfg.theta_true) * (trial.theta_estimate - cfg.theta_true);
        }
    }
    rec.mse = sq_err / rec.n_valid;
    if (rec.n_valid >= 2) {
        rec.variance = sq_dev / (rec.n_valid - 1);
        rec.stderr_variance = rec.variance * std::sqrt(2.0 / (rec.n_valid - 1));
        rec.precision_per_photon = 1.0 / (rec.variance * rec.mean_detected);
    }
    rec.accuracy_per_photon = 1.0 / (rec.mse * rec.mean_detected);
    return rec;
}

/// Biased estimate when the estimator assumes |t| + dt:
/// 2 atan(tan(theta/2) (1 + dt / t)).
inline double systematic_shift_t(double theta, double t, double dt) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "t must be positive");
    }
    return 2.0 * std::atan(std::tan(theta / 2.0) * (1.0 + dt / t));
}

/// Estimate inferred from the exact bench state: polar angle of its Bloch
/// vector, deamplified with the assumed |t|.
inline double noiseless_inferred_theta(const BenchConfig &cfg) {
    const Postselected bench = run_bench_state(cfg);
    const BlochVector b = to_bloch(bench.state);
    const double len = b.norm();
    if (!(len > 1e-9)) {
        throw Error(ErrorCode::undefined_angle, "bench state is maximally mixed");
    }
    const double polar = std::acos(std::clamp(b.z / len, -1.0, 1.0));
    return deamplified_angle(polar, std::abs(cfg.t_assumed()));
}

}  // namespace ppa
