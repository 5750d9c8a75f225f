// Copyright 2026 The qfi-lab Authors
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

namespace qfilab {

enum class ErrorCode {
    InvalidArgument,
    ScheduleOutOfRange,
    OverlappingPulses,
    StepTooLarge,
    DegenerateInput,
    SingularEstimate,
    Unphysical,
    DomainError,
    Config,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::ScheduleOutOfRange: return "schedule_out_of_range";
        case ErrorCode::OverlappingPulses: return "overlapping_pulses";
        case ErrorCode::StepTooLarge: return "step_too_large";
        case ErrorCode::DegenerateInput: return "degenerate_input";
        case ErrorCode::SingularEstimate: return "singular_estimate";
        case ErrorCode::Unphysical: return "unphysical";
        case ErrorCode::DomainError: return "domain_error";
        case ErrorCode::Config: return "config";
    }
    return "unknown";
}

/// Base exception for every library error. `code()` is stable and
/// machine-readable; `what()` is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised while reading configuration; carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(ErrorCode::Config, message), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace qfilab
