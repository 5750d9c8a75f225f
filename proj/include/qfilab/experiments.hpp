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

#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/noise.hpp"
#include "qfilab/parallel.hpp"
#include "qfilab/protocols.hpp"
#include "qfilab/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace qfilab {

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    detail::require(count >= 1, ErrorCode::InvalidArgument, "grid needs at least one point");
    detail::require(count == 1 || hi > lo, ErrorCode::InvalidArgument, "grid bounds must be increasing");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return v;
}

/// Logarithmically spaced integers in [lo, hi], duplicates removed.
inline std::vector<std::uint64_t> log_counts(std::uint64_t lo, std::uint64_t hi, std::size_t count) {
    detail::require(lo >= 1 && hi >= lo, ErrorCode::InvalidArgument, "count range must satisfy 1 <= min <= max");
    detail::require(count >= 1, ErrorCode::InvalidArgument, "grid needs at least one point");
    std::vector<std::uint64_t> v;
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double u = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const auto n = static_cast<std::uint64_t>(std::llround(std::exp(a + (b - a) * u)));
        if (v.empty() || n != v.back()) v.push_back(n);
    }
    return v;
}

/// Slope fits over a list of durations. Point k uses seed derive_seed(seed, k).
inline std::vector<SensitivityPoint> sensitivity_sweep(const ProtocolSpec& base, std::span<const double> times,
                                                       const SlopeFitOptions& options, std::size_t points = 101,
                                                       std::optional<double> span_fraction = std::nullopt) {
    std::vector<SensitivityPoint> out(times.size());
    parallel_for(times.size(), options.threads, [&](std::size_t k) {
        ProtocolSpec spec = base;
        spec.T = times[k];
        SlopeFitOptions o = options;
        o.seed = derive_seed(options.seed, k);
        o.threads = 1;
        const double center = o.parameter == SweepParameter::Omega ? spec.drive.omega : spec.drive.amplitude;
        const double span = span_fraction.value_or(default_span_fraction(spec, o.parameter, o.mode));
        const auto grid = parameter_grid(center, span, points);
        out[k] = slope_fit_qfi(spec, grid, o);
    });
    return out;
}

struct PhaseNoisePoint {
    std::uint64_t shots = 0;     // N per quadrature
    double stddev_phase = 0.0;   // sample standard deviation of the estimates (rad)
    double mean_std_error = 0.0; // average propagated per-estimate error (rad)
};

/// Repeated two-quadrature phase estimates at the steepest fringe point.
/// Repetition r at count index k draws from derive_seed(derive_seed(seed, k), r).
inline std::vector<PhaseNoisePoint> phase_noise_scan(const ProtocolSpec& spec, std::span<const std::uint64_t> shots,
                                                     std::size_t repetitions, std::uint64_t seed,
                                                     unsigned threads = 1) {
    spec.validate();
    detail::require(spec.kind != ProtocolKind::Rabi, ErrorCode::InvalidArgument,
                    "phase noise scan needs a Ramsey-type protocol");
    detail::require(repetitions >= 2, ErrorCode::InvalidArgument, "need at least 2 repetitions");
    const double phi = protocol_phase(spec);
    const double ref = spec.readout_phase.value_or(phi - 0.5 * kPi);
    ProtocolSpec in_phase = spec;
    in_phase.readout_phase = ref;
    ProtocolSpec quad = spec;
    quad.readout_phase = ref + 0.5 * kPi;
    const double p_in = excitation_probability(in_phase);
    const double p_q = excitation_probability(quad);

    std::vector<PhaseNoisePoint> out(shots.size());
    for (std::size_t k = 0; k < shots.size(); ++k) {
        detail::require(shots[k] >= 1, ErrorCode::InvalidArgument, "shot count must be >= 1");
        const std::uint64_t base = derive_seed(seed, k);
        std::vector<double> est(repetitions);
        std::vector<double> err(repetitions);
        parallel_for(repetitions, threads, [&](std::size_t r) {
            const std::uint64_t s = derive_seed(base, r);
            const auto a = sample_outcomes(p_in, shots[k], derive_seed(s, 0));
            const auto b = sample_outcomes(p_q, shots[k], derive_seed(s, 1));
            const PhaseEstimate e = estimate_phase(a, b);
            est[r] = detail::nearest_branch(ref + e.phase, phi);
            err[r] = e.std_error;
        });
        const double n = static_cast<double>(repetitions);
        const double mean = std::accumulate(est.begin(), est.end(), 0.0) / n;
        double ss = 0.0;
        for (double e : est) ss += (e - mean) * (e - mean);
        double es = 0.0;
        for (double e : err) es += std::isfinite(e) ? e : 0.0;
        out[k] = {shots[k], std::sqrt(ss / (n - 1.0)), es / n};
    }
    return out;
}

struct RabiComparisonPoint {
    double T = 0.0;
    double rabi_qfi = 0.0;
    double controlled_qfi = 0.0;
    double uncontrolled_qfi = 0.0;
};

inline std::vector<RabiComparisonPoint> rabi_comparison(const DriveParams& drive, std::span<const double> times) {
    std::vector<RabiComparisonPoint> out;
    out.reserve(times.size());
    for (double T : times) {
        ProtocolSpec s;
        s.drive = drive;
        s.T = T;
        s.kind = ProtocolKind::FrequencyOptimal;
        const double controlled = protocol_qfi(s).value;
        s.kind = ProtocolKind::RamseyUncontrolled;
        const double uncontrolled = protocol_qfi(s).value;
        out.push_back({T, rabi_qfi(drive.amplitude, T), controlled, uncontrolled});
    }
    return out;
}

struct AmplitudePoint {
    double T = 0.0;
    double slope_uncontrolled = 0.0;  // dφ/dA (rad per rad/μs)
    double slope_node = 0.0;
    double sensitivity_uncontrolled = 0.0;  // 1/|dφ/dA|
    double sensitivity_node = 0.0;
};

inline std::vector<AmplitudePoint> amplitude_comparison(const DriveParams& drive, std::span<const double> times) {
    std::vector<AmplitudePoint> out;
    out.reserve(times.size());
    auto inv = [](double s) { return s != 0.0 ? 1.0 / std::abs(s) : std::numeric_limits<double>::infinity(); };
    for (double T : times) {
        ProtocolSpec s;
        s.drive = drive;
        s.T = T;
        s.kind = ProtocolKind::RamseyUncontrolled;
        const double free = protocol_slope(s, SweepParameter::Amplitude);
        s.kind = ProtocolKind::AmplitudeOptimal;
        const double node = protocol_slope(s, SweepParameter::Amplitude);
        out.push_back({T, free, node, inv(free), inv(node)});
    }
    return out;
}

}  // namespace qfilab
