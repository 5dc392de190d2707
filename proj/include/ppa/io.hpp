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

/// JSON (nlohmann) mappings for configurations and datasets, and file
/// output with path context in error messages.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppa/errors.hpp"
#include "ppa/experiment.hpp"
#include "ppa/pipelines.hpp"
#include "ppa/quasiprob.hpp"

namespace ppa {

using Json = nlohmann::json;

/// A complex number is written as a plain number when real, else [re, im].
inline Json complex_to_json(cplx z) {
    if (z.imag() == 0.0) {
        return z.real();
    }
    return Json::array({z.real(), z.imag()});
}

inline cplx complex_from_json(const Json &j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw Error(ErrorCode::invalid_argument, "expected a number or [re, im]");
}

namespace detail {

template <typename T>
void read_if(const Json &j, const char *key, T &out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const Json::exception &e) {
        throw Error(ErrorCode::invalid_argument, std::string("field '") + key + "': " + e.what());
    }
}

inline void check_keys(const Json &j, std::initializer_list<const char *> allowed) {
    if (!j.is_object()) {
        throw Error(ErrorCode::invalid_argument, "configuration must be a JSON object");
    }
    for (const auto &item : j.items()) {
        bool known = false;
        for (const char *k : allowed) {
            known = known || item.key() == k;
        }
        if (!known) {
            throw Error(ErrorCode::invalid_argument, "unknown configuration field '" + item.key() + "'");
        }
    }
}

}  // namespace detail

inline Json to_json(const BenchConfig &c) {
    return Json{{"theta_true", c.theta_true},       {"t_set", complex_to_json(c.t_set)},
                {"delta_t", c.delta_t},             {"epsilon", c.epsilon},
                {"visibility", c.visibility},       {"photon_budget", c.photon_budget},
                {"sampling_mode", to_string(c.sampling_mode)}, {"n_trials", c.n_trials},
                {"seed", c.seed}};
}

inline BenchConfig bench_config_from_json(const Json &j) {
    detail::check_keys(j, {"theta_true", "t_set", "delta_t", "epsilon", "visibility", "photon_budget",
                           "sampling_mode", "n_trials", "seed"});
    BenchConfig c;
    detail::read_if(j, "theta_true", c.theta_true);
    if (j.contains("t_set")) {
        c.t_set = complex_from_json(j["t_set"]);
    }
    detail::read_if(j, "delta_t", c.delta_t);
    detail::read_if(j, "epsilon", c.epsilon);
    detail::read_if(j, "visibility", c.visibility);
    detail::read_if(j, "photon_budget", c.photon_budget);
    if (j.contains("sampling_mode")) {
        c.sampling_mode = sampling_mode_from_string(j["sampling_mode"].get<std::string>());
    }
    detail::read_if(j, "n_trials", c.n_trials);
    detail::read_if(j, "seed", c.seed);
    c.validate();
    return c;
}

inline Json to_json(const SweepSpec &s) {
    return Json{{"theta_list", s.theta_list}, {"t_list", s.t_list},     {"visibility", s.visibility},
                {"epsilon", s.epsilon},       {"delta_t", s.delta_t},   {"photon_budget", s.photon_budget},
                {"sampling_mode", to_string(s.sampling_mode)},          {"n_trials", s.n_trials},
                {"seed", s.seed},             {"output_path", s.output_path}};
}

/// Fields absent from `j` keep their values in `base`.
inline SweepSpec sweep_spec_from_json(const Json &j, SweepSpec base = {}) {
    detail::check_keys(j, {"theta_list", "t_list", "visibility", "epsilon", "delta_t", "photon_budget",
                           "sampling_mode", "n_trials", "seed", "output_path"});
    detail::read_if(j, "theta_list", base.theta_list);
    detail::read_if(j, "t_list", base.t_list);
    detail::read_if(j, "visibility", base.visibility);
    detail::read_if(j, "epsilon", base.epsilon);
    detail::read_if(j, "delta_t", base.delta_t);
    detail::read_if(j, "photon_budget", base.photon_budget);
    if (j.contains("sampling_mode")) {
        base.sampling_mode = sampling_mode_from_string(j["sampling_mode"].get<std::string>());
    }
    detail::read_if(j, "n_trials", base.n_trials);
    detail::read_if(j, "seed", base.seed);
    detail::read_if(j, "output_path", base.output_path);
    base.validate();
    return base;
}

inline Json to_json(const Fig4Spec &s) {
    return Json{{"theta_list", s.theta_list}, {"t_list", s.t_list},   {"visibility", s.visibility},
                {"shots_per_basis", s.shots_per_basis},             {"runs", s.runs},
                {"dtheta", s.dtheta},         {"seed", s.seed},       {"output_path", s.output_path}};
}

inline Fig4Spec fig4_spec_from_json(const Json &j, Fig4Spec base = {}) {
    detail::check_keys(j, {"theta_list", "t_list", "visibility", "shots_per_basis", "runs", "dtheta", "seed",
                           "output_path"});
    detail::read_if(j, "theta_list", base.theta_list);
    detail::read_if(j, "t_list", base.t_list);
    detail::read_if(j, "visibility", base.visibility);
    detail::read_if(j, "shots_per_basis", base.shots_per_basis);
    detail::read_if(j, "runs", base.runs);
    detail::read_if(j, "dtheta", base.dtheta);
    detail::read_if(j, "seed", base.seed);
    detail::read_if(j, "output_path", base.output_path);
    return base;
}

/// {"labels": [[...], ...], "re": [...], "im": [...]}, values row-major.
inline Json to_json(const KDDistribution &kd) {
    Json re = Json::array();
    Json im = Json::array();
    for (const auto &v : kd.values()) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return Json{{"labels", kd.labels()}, {"re", re}, {"im", im}};
}

inline KDDistribution kd_from_json(const Json &j) {
    const auto labels = j.at("labels").get<std::vector<std::vector<std::string>>>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size()) {
        throw Error(ErrorCode::dimension_mismatch, "re and im lengths differ");
    }
    std::vector<cplx> values;
    for (std::size_t k = 0; k < re.size(); ++k) {
        values.emplace_back(re[k], im[k]);
    }
    return KDDistribution(labels, std::move(values));
}

inline Json to_json(const std::vector<KdPoint> &points) {
    Json rows = Json::array();
    static const char *names[2] = {"a+", "a-"};
    for (const auto &p : points) {
        Json values = Json::object();
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                values[std::string(names[a]) + "," + names[b]] = {p.table[a][b].real(), p.table[a][b].imag()};
            }
        }
        rows.push_back({{"theta", p.theta},
                        {"t_mag", p.t_mag},
                        {"values", values},
                        {"sum", {p.sum.real(), p.sum.imag()}},
                        {"gap", p.gap},
                        {"four_gap", p.four_gap},
                        {"qfi_theory", p.qfi_theory}});
    }
    return Json{{"points", rows}};
}

inline Json to_json(const VerificationReport &report) {
    Json suites = Json::array();
    for (const auto &s : report.suites) {
        suites.push_back({{"name", s.name},
                          {"instances", s.instances},
                          {"max_residual", std::isfinite(s.max_residual) ? Json(s.max_residual) : Json("inf")},
                          {"tolerance", s.tolerance},
                          {"passed", s.passed},
                          {"failure", s.failure}});
    }
    return Json{{"passed", report.passed()}, {"suites", suites}};
}

inline Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception &e) {
        throw Error(ErrorCode::io, "cannot parse '" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
        throw Error(ErrorCode::io, "write to '" + path + "' failed");
    }
}

}  // namespace ppa
