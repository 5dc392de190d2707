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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ppa/experiment.hpp"

namespace {

using ppa::BenchConfig;
using ppa::cplx;
using ppa::DensityMatrix;
using ppa::ErrorCode;
using ppa::TrialResult;

template <typename F>
void expect_code(ErrorCode code, F &&f) {
    try {
        f();
        ADD_FAILURE() << "expected error " << ppa::to_string(code);
    } catch (const ppa::Error &e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

BenchConfig ideal(double theta, double t) {
    BenchConfig cfg;
    cfg.theta_true = theta;
    cfg.t_set = t;
    return cfg;
}

TEST(SourceState, VisibilityControlsBlochLength) {
    EXPECT_NEAR(ppa::source_state(1.0).purity(), 1.0, 1e-15);
    EXPECT_NEAR(ppa::to_bloch(ppa::source_state(1.0)).z, -1.0, 1e-15);
    EXPECT_LT((ppa::source_state(0.0).matrix() - ppa::identity(2) / 2.0).norm(), 1e-15);
    EXPECT_NEAR(ppa::to_bloch(ppa::source_state(0.98)).norm(), 0.98, 1e-15);
}

TEST(WaveplateGenerator, RotatedAxisWithUnitSpread) {
    EXPECT_LT((ppa::waveplate_generator(0.0).matrix() - oracle::sx() / 2.0).norm(), 1e-15);
    for (const double eps : {-0.5, -0.01, 0.0, 0.02, 0.7}) {
        const auto a = ppa::waveplate_generator(eps);
        ASSERT_EQ(a.eigenvalues().size(), 2u);
        EXPECT_NEAR(a.eigenvalues()[0], -0.5, 1e-14);
        EXPECT_NEAR(a.eigenvalues()[1], 0.5, 1e-14);
        EXPECT_NEAR(a.spread(), 1.0, 1e-14);
    }
}

TEST(BenchState, ZeroAngleMapsVerticalToHorizontal) {
    for (const double t : {0.044, 0.5, 1.0}) {
        const auto out = ppa::run_bench_state(ideal(0.0, t));
        EXPECT_NEAR(out.probability, t * t, 1e-14);
        EXPECT_GE(out.state.fidelity_with(ppa::basis_vector(2, 0)), 1.0 - 1e-12);
    }
}

TEST(BenchState, SurvivalProbabilityAtSmallAngle) {
    const auto out = ppa::run_bench_state(ideal(0.040, 0.044));
    EXPECT_NEAR(out.probability, 0.044 * 0.044 * std::pow(std::cos(0.02), 2) + std::pow(std::sin(0.02), 2), 1e-15);
}

TEST(BenchState, UnitAmplitudeReturnsEvolvedInput) {
    BenchConfig cfg = ideal(0.3, 1.0);
    cfg.visibility = 0.9;
    const auto out = ppa::run_bench_state(cfg);
    EXPECT_NEAR(out.probability, 1.0, 1e-14);
    const oracle::Mat u = oracle::expi(oracle::sx() / 2.0, 0.3 - oracle::pi);
    const oracle::Mat want = u * ppa::source_state(0.9).matrix() * u.adjoint();
    EXPECT_LT((out.state.matrix() - want).norm(), 1e-12);
}

TEST(BenchState, CoincidesWithAnalysisFrame) {
    for (const double v : {1.0, 0.95}) {
        for (const cplx t : {cplx(0.1), cplx(0.4, 0.3)}) {
            for (const double theta : {0.02, 0.3, 1.4}) {
                BenchConfig cfg = ideal(theta, 0.0);
                cfg.t_set = t;
                cfg.visibility = v;
                const auto bench = ppa::run_bench_state(cfg);
                EXPECT_LT((bench.state.matrix() - oracle::ppa_state(theta, t, v)).norm(), 1e-12);
            }
        }
    }
}

TEST(SampleCounts, ZeroBudget) {
    std::mt19937_64 rng(41);
    const auto r = ppa::sample_counts(DensityMatrix::maximally_mixed(2), 0.5, {}, 0, ppa::SamplingMode::fixed, rng);
    EXPECT_EQ(r.n_detected, 0u);
    EXPECT_EQ(r.counts_plus, 0u);
    EXPECT_EQ(r.counts_minus, 0u);
}

TEST(SampleCounts, EigenstateNeverGivesMinus) {
    std::mt19937_64 rng(42);
    const ppa::MeasurementDirection up{0.0, 0.0};
    for (int i = 0; i < 100; ++i) {
        const auto r = ppa::sample_counts(DensityMatrix::pure(ppa::basis_vector(2, 0)), 0.3, up, 1000,
                                          ppa::SamplingMode::fixed, rng);
        EXPECT_EQ(r.counts_minus, 0u);
        EXPECT_EQ(r.counts_plus, r.n_detected);
    }
}

TEST(SampleCounts, DetectionMomentsMatchBinomialAndPoisson) {
    const double p = 0.0123;
    const std::uint64_t budget = 5000;
    const int reps = 10000;
    for (const auto mode : {ppa::SamplingMode::fixed, ppa::SamplingMode::poisson}) {
        std::mt19937_64 rng(43);
        double sum = 0.0;
        for (int i = 0; i < reps; ++i) {
            const auto r = ppa::sample_counts(DensityMatrix::maximally_mixed(2), p, {}, budget, mode, rng);
            EXPECT_EQ(r.counts_plus + r.counts_minus, r.n_detected);
            sum += static_cast<double>(r.n_detected);
        }
        const double mean = budget * p;
        const double var = mode == ppa::SamplingMode::fixed ? budget * p * (1 - p) : budget * p;
        EXPECT_NEAR(sum / reps, mean, 3.0 * std::sqrt(var / reps));
    }
}

TEST(EstimateTheta, NoiselessFrequencyInvertsExactly) {
    for (const double theta : {0.02, 0.04, 0.2, 1.0}) {
        for (const cplx t : {cplx(0.044), cplx(0.5), cplx(0.3, -0.2), cplx(1.0)}) {
            BenchConfig cfg = ideal(theta, 0.0);
            cfg.t_set = t;
            const auto bench = ppa::run_bench_state(cfg);
            const auto dir = ppa::optimal_measurement(theta, t);
            const double q = ppa::outcome_probability(bench.state, dir);
            TrialResult counts;
            counts.n_detected = 1ULL << 52;
            counts.counts_plus = static_cast<std::uint64_t>(std::llround(q * static_cast<double>(counts.n_detected)));
            counts.counts_minus = counts.n_detected - counts.counts_plus;
            const auto est = ppa::estimate_theta(counts, t, dir, theta);
            EXPECT_NEAR(est.theta, theta, 1e-9) << theta << " " << t;
            EXPECT_NEAR(est.amplified, ppa::amplified_angle(theta, std::abs(t)), 1e-8);
            EXPECT_FALSE(est.clamped);
        }
    }
}

TEST(EstimateTheta, NoDataAndClamping) {
    const auto dir = ppa::optimal_measurement(0.1, 0.1);
    expect_code(ErrorCode::no_data, [&] { ppa::estimate_theta(TrialResult{}, 0.1, dir, 0.1); });
    TrialResult all_plus;
    all_plus.n_detected = 10;
    all_plus.counts_plus = 10;
    EXPECT_TRUE(ppa::estimate_theta(all_plus, 0.1, dir, 0.1).clamped);
    TrialResult none_plus;
    none_plus.n_detected = 10;
    none_plus.counts_minus = 10;
    const auto est = ppa::estimate_theta(none_plus, 0.1, dir, 0.1);
    EXPECT_TRUE(est.clamped);
    EXPECT_TRUE(std::isfinite(est.theta));
}

TEST(SystematicShift, FilterCalibrationFormula) {
    EXPECT_EQ(ppa::systematic_shift_t(0.3, 0.2, 0.0), 0.3);
    EXPECT_NEAR(ppa::systematic_shift_t(0.1, 0.1, 0.01), 2.0 * std::atan(std::tan(0.05) * 1.1), 1e-15);
    EXPECT_NEAR(ppa::systematic_shift_t(0.1, 0.1, 0.01), 0.10998, 1e-5);
    expect_code(ErrorCode::invalid_argument, [] { ppa::systematic_shift_t(0.1, 0.0, 0.01); });
}

TEST(SystematicShift, HalfTangentShiftIsAmplifiedTangentTimesError) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> theta_d(0.01, 1.5);
    std::uniform_real_distribution<double> t_d(0.05, 0.9);
    std::uniform_real_distribution<double> dt_d(-0.02, 0.02);
    for (int i = 0; i < 200; ++i) {
        const double theta = theta_d(rng);
        const double t = t_d(rng);
        const double dt = dt_d(rng);
        const double shifted = ppa::systematic_shift_t(theta, t, dt);
        const double big = oracle::amplified(theta, t);
        EXPECT_NEAR(std::tan(shifted / 2) - std::tan(theta / 2), std::tan(big / 2) * dt, 1e-12);
    }
}

TEST(SystematicShift, NoiselessBenchReproducesCalibrationBias) {
    BenchConfig cfg = ideal(0.1, 0.1);
    cfg.delta_t = 0.01;
    EXPECT_NEAR(ppa::noiseless_inferred_theta(cfg), ppa::systematic_shift_t(0.1, 0.1, 0.01), 1e-12);
}

TEST(Misalignment, InferredHalfTangentFormula) {
    for (const double t : {1.0, 0.1, 0.044}) {
        for (const double eps : {0.01, 0.02, -0.015}) {
            for (const double theta : {0.004, 0.04}) {
                BenchConfig cfg = ideal(theta, t);
                cfg.epsilon = eps;
                const double got = std::tan(ppa::noiseless_inferred_theta(cfg) / 2.0);
                const double s = std::sin(2 * eps);
                const double c = std::cos(2 * eps);
                const double want = std::sqrt((s * s + std::pow(std::tan(theta / 2), 2)) / (c * c));
                EXPECT_NEAR(got, want, 1e-6) << t << " " << eps << " " << theta;
            }
        }
    }
    BenchConfig cfg = ideal(0.04, 1.0);
    cfg.epsilon = 0.01;
    EXPECT_NEAR(std::tan(ppa::noiseless_inferred_theta(cfg) / 2.0), 0.028291, 1e-6);
}

TEST(RunTrials, IdealBenchReachesQuantumCramerRao) {
    BenchConfig cfg = ideal(0.2, 0.5);
    cfg.photon_budget = 1000000;
    cfg.n_trials = 32;
    cfg.seed = 2024;
    const auto rec = ppa::run_trials(cfg, 4);
    const double stderr_precision = rec.precision_per_photon * std::sqrt(2.0 / (cfg.n_trials - 1));
    EXPECT_NEAR(rec.qfi_theory, 3.7711, 1e-4);
    EXPECT_NEAR(rec.precision_per_photon, 3.7711, 3.0 * stderr_precision);
    EXPECT_NEAR(rec.precision_per_photon, 1.0 / (rec.variance * rec.mean_detected), 1e-9 * rec.precision_per_photon);
    EXPECT_NEAR(rec.accuracy_per_photon, 1.0 / (rec.mse * rec.mean_detected), 1e-9 * rec.accuracy_per_photon);
    EXPECT_NEAR(rec.stderr_variance, rec.variance * std::sqrt(2.0 / 31.0), 1e-18);
    EXPECT_TRUE(rec.flags.empty());
}

TEST(RunTrials, UnbiasedLimitMseApproachesVariance) {
    BenchConfig cfg = ideal(0.3, 0.3);
    cfg.photon_budget = 100000000;
    cfg.n_trials = 64;
    cfg.seed = 5;
    const auto rec = ppa::run_trials(cfg);
    EXPECT_NEAR(rec.mse / rec.variance, 1.0, 4.0 * std::sqrt(2.0 / 63.0));
}

TEST(RunTrials, DeterministicAcrossWorkerCounts) {
    BenchConfig cfg = ideal(0.04, 0.044);
    cfg.photon_budget = 1000000;
    cfg.n_trials = 24;
    cfg.seed = 99;
    cfg.sampling_mode = ppa::SamplingMode::poisson;
    const auto a = ppa::run_trials(cfg, 1);
    const auto b = ppa::run_trials(cfg, 7);
    EXPECT_EQ(a.mean_estimate, b.mean_estimate);
    EXPECT_EQ(a.variance, b.variance);
    EXPECT_EQ(a.mse, b.mse);
    EXPECT_EQ(a.mean_detected, b.mean_detected);
}

TEST(RunTrials, CalibrationErrorBiasIsStatisticallySignificant) {
    BenchConfig cfg = ideal(0.1, 0.1);
    cfg.delta_t = 0.01;
    cfg.photon_budget = 100000000;
    cfg.n_trials = 32;
    cfg.seed = 7;
    const auto rec = ppa::run_trials(cfg);
    const double bias = rec.mean_estimate - 0.1;
    EXPECT_NEAR(bias, 0.010, 5e-4);
    EXPECT_GT(bias / std::sqrt(rec.variance / cfg.n_trials), 2.0);
}

TEST(RunTrials, NoDetectionsAreFlagged) {
    BenchConfig cfg = ideal(0.1, 0.5);
    cfg.photon_budget = 0;
    cfg.n_trials = 4;
    const auto rec = ppa::run_trials(cfg);
    ASSERT_EQ(rec.flags.size(), 1u);
    EXPECT_EQ(rec.flags[0], "no_data");
    EXPECT_TRUE(std::isnan(rec.mean_estimate));
}

TEST(BenchConfig, Validation) {
    BenchConfig cfg = ideal(0.1, 0.95);
    cfg.delta_t = 0.1;
    expect_code(ErrorCode::invalid_argument, [&] { cfg.validate(); });
    cfg = ideal(0.1, 0.5);
    cfg.visibility = 0.0;
    expect_code(ErrorCode::invalid_argument, [&] { cfg.validate(); });
    cfg = ideal(0.1, 0.5);
    cfg.n_trials = 1;
    expect_code(ErrorCode::invalid_argument, [&] { ppa::run_trials(cfg); });
    cfg = ideal(0.1, 0.5);
    cfg.epsilon = 1.0;
    expect_code(ErrorCode::invalid_argument, [&] { cfg.validate(); });
}

}  // namespace
