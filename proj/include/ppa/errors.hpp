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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppa {

enum class ErrorCode {
    invalid_argument,
    dimension_mismatch,
    invalid_generator,
    not_unitary,
    not_physical,
    zero_probability,
    undefined_amplification,
    inconsistent_derivative,
    not_pure,
    degenerate_measurement,
    no_data,
    precondition,
    condition_not_met,
    undefined_angle,
    io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::invalid_generator: return "invalid-generator";
        case ErrorCode::not_unitary: return "not-unitary";
        case ErrorCode::not_physical: return "not-physical";
        case ErrorCode::zero_probability: return "zero-probability-postselection";
        case ErrorCode::undefined_amplification: return "undefined-amplification";
        case ErrorCode::inconsistent_derivative: return "inconsistent-derivative";
        case ErrorCode::not_pure: return "not-pure";
        case ErrorCode::degenerate_measurement: return "degenerate-measurement";
        case ErrorCode::no_data: return "no-data";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::condition_not_met: return "condition-not-met";
        case ErrorCode::undefined_angle: return "undefined-angle";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library. `code()` identifies the contract
/// that was violated; `what()` carries a human-readable context string.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

private:
    ErrorCode code_;
};

}  // namespace ppa
