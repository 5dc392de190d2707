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

// ppa_cli: parameter sweeps, quasiprobability and information datasets,
// and the invariant verification suites.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppa/io.hpp"
#include "ppa/ppa.hpp"

namespace {

namespace fs = std::filesystem;

/// --out wins, then the config's output_path, then $PPA_OUTPUT_DIR/<name>,
/// then ./<name>.
std::string resolve_output(const std::string &flag, const std::string &from_config, const std::string &name) {
    if (!flag.empty()) {
        return flag;
    }
    if (!from_config.empty()) {
        return from_config;
    }
    const char *dir = std::getenv("PPA_OUTPUT_DIR");
    fs::path base = dir && *dir ? fs::path(dir) : fs::path(".");
    return (base / name).string();
}

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<double> thetas;
    std::vector<double> ts;
    unsigned workers = 0;
};

void add_common(CLI::App *cmd, CommonFlags &f, bool grid) {
    cmd->add_option("--seed", f.seed, "64-bit seed");
    cmd->add_option("--out", f.out, "output file");
    cmd->add_option("--workers", f.workers, "worker threads (0 = hardware concurrency)");
    if (grid) {
        cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--theta", f.thetas, "true angles in radians (comma separated)")->delimiter(',');
        cmd->add_option("--t", f.ts, "filter amplitudes |t| (comma separated)")->delimiter(',');
    }
}

void report(const ppa::VerificationReport &r) {
    for (const auto &s : r.suites) {
        std::cout << (s.passed ? "ok   " : "FAIL ") << s.name << "  instances=" << s.instances
                  << "  max_residual=" << ppa::format_number(s.max_residual)
                  << "  tolerance=" << ppa::format_number(s.tolerance);
        if (!s.failure.empty()) {
            std::cout << "  (" << s.failure << ")";
        }
        std::cout << "\n";
    }
    std::cout << (r.passed() ? "verify: all suites passed" : "verify: FAILED") << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Partially postselected amplification simulator"};
    app.require_subcommand(1);

    CommonFlags sweep_flags;
    std::optional<std::uint64_t> budget;
    std::optional<int> trials;
    std::optional<double> visibility;
    std::optional<double> epsilon;
    std::optional<double> delta_t;
    std::optional<std::string> mode;
    auto *sweep = app.add_subcommand("sweep", "Monte Carlo estimation over a (theta, t) grid, CSV output");
    add_common(sweep, sweep_flags, true);
    sweep->add_option("--budget", budget, "input photons per trial");
    sweep->add_option("--trials", trials, "trials per grid point");
    sweep->add_option("--v", visibility, "source visibility");
    sweep->add_option("--epsilon", epsilon, "waveplate axis misalignment (rad)");
    sweep->add_option("--delta-t", delta_t, "filter calibration error assumed by the estimator");
    sweep->add_option("--mode", mode, "photon sampling mode")->check(CLI::IsMember({"fixed", "poisson"}));

    CommonFlags kd_flags;
    std::uint64_t kd_shots = 0;
    auto *kd = app.add_subcommand("kd", "conditional quasiprobability tables, JSON output");
    add_common(kd, kd_flags, true);
    kd->add_option("--shots", kd_shots, "tomography shots per basis (0 = exact state)");

    CommonFlags fig_flags;
    std::optional<std::uint64_t> fig_shots;
    std::optional<int> fig_runs;
    std::optional<double> fig_v;
    std::optional<double> fig_dtheta;
    auto *fig4 = app.add_subcommand("fig4", "tomographic QFI and 4 x gap per detected and per input photon, CSV");
    add_common(fig4, fig_flags, true);
    fig4->add_option("--shots", fig_shots, "tomography shots per basis");
    fig4->add_option("--runs", fig_runs, "tomography repetitions per grid point");
    fig4->add_option("--v", fig_v, "source visibility");
    fig4->add_option("--dtheta", fig_dtheta, "three-point slope step (rad)");

    CommonFlags verify_flags;
    std::size_t instances = 1000;
    auto *verify = app.add_subcommand("verify", "invariant suites; exit status 0 iff all pass");
    add_common(verify, verify_flags, false);
    verify->add_option("--instances", instances, "randomized qubit instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            ppa::SweepSpec spec;
            if (!sweep_flags.config.empty()) {
                spec = ppa::sweep_spec_from_json(ppa::read_json_file(sweep_flags.config));
            }
            if (!sweep_flags.thetas.empty()) spec.theta_list = sweep_flags.thetas;
            if (!sweep_flags.ts.empty()) spec.t_list = sweep_flags.ts;
            if (sweep_flags.seed) spec.seed = *sweep_flags.seed;
            if (budget) spec.photon_budget = *budget;
            if (trials) spec.n_trials = *trials;
            if (visibility) spec.visibility = *visibility;
            if (epsilon) spec.epsilon = *epsilon;
            if (delta_t) spec.delta_t = *delta_t;
            if (mode) spec.sampling_mode = ppa::sampling_mode_from_string(*mode);
            const std::string path = resolve_output(sweep_flags.out, spec.output_path, "sweep.csv");
            ppa::write_text_file(path, ppa::sweep_csv(ppa::run_sweep(spec, sweep_flags.workers)));
            std::cout << "wrote " << path << "\n";
            return 0;
        }
        if (*kd) {
            std::vector<double> thetas = ppa::kDefaultThetas;
            std::vector<double> ts = ppa::kDefaultTs;
            std::uint64_t seed = 0;
            std::string config_out;
            if (!kd_flags.config.empty()) {
                const ppa::Json j = ppa::read_json_file(kd_flags.config);
                if (j.contains("theta_list")) thetas = j["theta_list"].get<std::vector<double>>();
                if (j.contains("t_list")) ts = j["t_list"].get<std::vector<double>>();
                if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
                if (j.contains("shots_per_basis")) kd_shots = j["shots_per_basis"].get<std::uint64_t>();
                if (j.contains("output_path")) config_out = j["output_path"].get<std::string>();
            }
            if (!kd_flags.thetas.empty()) thetas = kd_flags.thetas;
            if (!kd_flags.ts.empty()) ts = kd_flags.ts;
            if (kd_flags.seed) seed = *kd_flags.seed;
            const std::string path = resolve_output(kd_flags.out, config_out, "kd.json");
            const auto points = ppa::run_kd(thetas, ts, kd_shots, seed, kd_flags.workers);
            ppa::write_text_file(path, ppa::to_json(points).dump(2) + "\n");
            std::cout << "wrote " << path << "\n";
            return 0;
        }
        if (*fig4) {
            ppa::Fig4Spec spec;
            if (!fig_flags.config.empty()) {
                spec = ppa::fig4_spec_from_json(ppa::read_json_file(fig_flags.config));
            }
            if (!fig_flags.thetas.empty()) spec.theta_list = fig_flags.thetas;
            if (!fig_flags.ts.empty()) spec.t_list = fig_flags.ts;
            if (fig_flags.seed) spec.seed = *fig_flags.seed;
            if (fig_shots) spec.shots_per_basis = *fig_shots;
            if (fig_runs) spec.runs = *fig_runs;
            if (fig_v) spec.visibility = *fig_v;
            if (fig_dtheta) spec.dtheta = *fig_dtheta;
            const std::string path = resolve_output(fig_flags.out, spec.output_path, "fig4.csv");
            ppa::write_text_file(path, ppa::fig4_csv(ppa::run_fig4(spec, fig_flags.workers)));
            std::cout << "wrote " << path << "\n";
            return 0;
        }
        if (*verify) {
            const auto result = ppa::run_verification(verify_flags.seed.value_or(0), instances, verify_flags.workers);
            report(result);
            if (!verify_flags.out.empty()) {
                ppa::write_text_file(verify_flags.out, ppa::to_json(result).dump(2) + "\n");
            }
            return result.passed() ? 0 : 1;
        }
    } catch (const ppa::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
