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

// Control landscape: Fisher information as the pulse train's frequency and
// phase are detuned from the signal.

#pragma once

#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/fisher.hpp"
#include "qfilab/noise.hpp"
#include "qfilab/parallel.hpp"
#include "qfilab/protocols.hpp"
#include "qfilab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qfilab {

/// Axes of a landscape sweep. Control frequencies are given relative to the
/// true ω; phase offsets Δθ delay the pulse train, i.e. pulses sit at the
/// antinodes of sin(ω_c t + θ − Δθ).
struct LandscapeGridSpec {
    double ratio_min = 0.8;
    double ratio_max = 1.2;
    std::size_t freq_points = 41;
    double phase_min = -0.5 * kPi;
    double phase_max = 0.5 * kPi;
    std::size_t phase_points = 41;

    void validate() const {
        detail::require(freq_points >= 1 && phase_points >= 1, ErrorCode::InvalidArgument,
                        "landscape axes need at least one point");
        detail::require(ratio_min > 0.0 && (freq_points == 1 || ratio_max > ratio_min), ErrorCode::InvalidArgument,
                        "control frequency ratios must be > 0 and increasing");
        detail::require(phase_points == 1 || phase_max > phase_min, ErrorCode::InvalidArgument,
                        "control phase axis must be increasing");
    }

    [[nodiscard]] std::vector<double> control_frequencies(double omega) const {
        std::vector<double> v(freq_points);
        for (std::size_t i = 0; i < freq_points; ++i) {
            const double u = freq_points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(freq_points - 1);
            v[i] = omega * (ratio_min + (ratio_max - ratio_min) * u);
        }
        return v;
    }

    [[nodiscard]] std::vector<double> phase_offsets() const {
        std::vector<double> v(phase_points);
        for (std::size_t j = 0; j < phase_points; ++j) {
            const double u = phase_points == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(phase_points - 1);
            v[j] = phase_min + (phase_max - phase_min) * u;
        }
        return v;
    }
};

struct LandscapeGrid {
    std::vector<double> control_freq_axis;   // ω_c (rad/μs)
    std::vector<double> control_phase_axis;  // Δθ (rad)
    double T = 0.0;
    std::vector<double> qfi;  // row-major: frequency index, then phase index

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return qfi[i * control_phase_axis.size() + j]; }

    [[nodiscard]] std::pair<std::size_t, std::size_t> argmax() const {
        std::size_t best = 0;
        for (std::size_t k = 1; k < qfi.size(); ++k) {
            if (qfi[k] > qfi[best]) best = k;
        }
        return {best / control_phase_axis.size(), best % control_phase_axis.size()};
    }
};

struct LandscapeOptions {
    SimulationMode mode = SimulationMode::Noiseless;
    std::uint64_t shots = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double pulse_offset = 0.0;  // fixed delay between pulses and signal (μs)
    NoiseParams noise;
    std::size_t slope_points = 101;
};

/// The protocol evaluated in one landscape cell.
inline ProtocolSpec landscape_cell_spec(const DriveParams& truth, double control_omega, double delta_theta, double T,
                                        const LandscapeOptions& options) {
    ProtocolSpec spec;
    spec.kind = ProtocolKind::FrequencyOptimal;
    spec.drive = truth;
    spec.T = T;
    spec.noise = options.noise;
    spec.control = DriveParams::make(truth.amplitude, control_omega, truth.theta - delta_theta);
    spec.pulse_offset = options.pulse_offset;
    return spec;
}

/// Per-cell Fisher information over the (ω_c, Δθ) grid. Noiseless mode
/// evaluates the generator integral; sampled mode runs a slope fit with a
/// seed derived from the cell index, so the result does not depend on
/// `threads`.
inline LandscapeGrid landscape_sweep(const DriveParams& truth, const LandscapeGridSpec& grid, double T,
                                     const LandscapeOptions& options) {
    truth.validate();
    grid.validate();
    detail::require(T > 0.0, ErrorCode::InvalidArgument, "protocol duration must be > 0");

    LandscapeGrid out;
    out.control_freq_axis = grid.control_frequencies(truth.omega);
    out.control_phase_axis = grid.phase_offsets();
    out.T = T;
    const std::size_t nf = out.control_freq_axis.size();
    const std::size_t np = out.control_phase_axis.size();
    out.qfi.assign(nf * np, 0.0);

    parallel_for(nf * np, options.threads, [&](std::size_t cell) {
        const std::size_t i = cell / np;
        const std::size_t j = cell % np;
        const ProtocolSpec spec = landscape_cell_spec(truth, out.control_freq_axis[i], out.control_phase_axis[j], T, options);
        if (options.mode == SimulationMode::Noiseless) {
            out.qfi[cell] = qfi_generator(truth, schedule_for(spec), T).value;
            return;
        }
        SlopeFitOptions fit;
        fit.mode = SimulationMode::Sampled;
        fit.shots = options.shots;
        fit.seed = derive_seed(options.seed, cell);
        fit.threads = 1;
        out.qfi[cell] = slope_fit_qfi(spec, fit, options.slope_points).qfi.value;
    });
    return out;
}

}  // namespace qfilab
