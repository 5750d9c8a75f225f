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

// Iterative adaptive frequency estimation: each round places antinode pulses
// at the current estimate and runs for T_n = √I_{n−1} (I in μs², T in μs).

#pragma once

#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/fisher.hpp"
#include "qfilab/noise.hpp"
#include "qfilab/protocols.hpp"
#include "qfilab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace qfilab {

namespace detail {

inline double round_gain(double amplitude, double shots) {
    return (amplitude / kPi) * (amplitude / kPi) * (1.0 - 1.0 / (2.0 * shots));
}

}  // namespace detail

/// ln I_n for I_n = I₀^(2ⁿ) ((A/π)²(1 − 1/(2N)))^(2ⁿ − 1).
inline double iteration_log_info(double info0, double amplitude, double shots, int n) {
    detail::require(info0 > 0.0, ErrorCode::InvalidArgument, "initial information must be > 0");
    detail::require(shots >= 1.0, ErrorCode::InvalidArgument, "repetition count must be >= 1");
    detail::require(amplitude > 0.0, ErrorCode::InvalidArgument, "amplitude must be > 0");
    detail::require(n >= 0 && n < 1000, ErrorCode::InvalidArgument, "iteration index out of range");
    const double p = std::ldexp(1.0, n);
    return p * std::log(info0) + (p - 1.0) * std::log(detail::round_gain(amplitude, shots));
}

inline double iteration_info(double info0, double amplitude, double shots, int n) {
    const double log_info = iteration_log_info(info0, amplitude, shots, n);
    if (log_info > 709.0) throw Error(ErrorCode::DomainError, "I_n overflows a double; use iteration_log_info");
    return std::exp(log_info);
}

struct InfoBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Bounds on the total information after spending T_tot with N repetitions
/// per round: upper (N A²/π²)(T_tot/N)⁴, lower with T_tot/N divided by
/// log₂ ln(T_tot/N). The divisor is floored at one round.
inline InfoBounds total_info_bounds(double total_time, double shots, double amplitude) {
    detail::require(shots >= 1.0 && amplitude > 0.0, ErrorCode::InvalidArgument, "need N >= 1 and A > 0");
    const double x = total_time / shots;
    if (!(x > std::exp(1.0))) throw Error(ErrorCode::DomainError, "T_tot/N must exceed e");
    const double rounds = std::max(1.0, std::log2(std::log(x)));
    const double prefactor = shots * amplitude * amplitude / (kPi * kPi);
    return {prefactor * std::pow(x / rounds, 4), prefactor * std::pow(x, 4)};
}

/// Round index at which T_n reaches T_budget/N under the ideal schedule:
/// 1 + log₂[(2 ln(T_budget/N) + ln K) / ln(I₀K)], K = (A/π)²(1 − 1/(2N)).
inline double predicted_rounds(double info0, double amplitude, double shots, double time_budget) {
    const double k = detail::round_gain(amplitude, shots);
    const double growth = std::log(info0 * k);
    detail::require(growth > 0.0, ErrorCode::DomainError, "schedule does not grow: I0 (A/pi)^2 (1 - 1/2N) <= 1");
    const double num = 2.0 * std::log(time_budget / shots) + std::log(k);
    detail::require(num > 0.0, ErrorCode::DomainError, "budget too small for any controlled round");
    return 1.0 + std::log2(num / growth);
}

struct AdaptiveRound {
    int n = 0;
    double T = 0.0;
    double info = 0.0;            // I_n (μs²), including readout visibility
    double omega_estimate = 0.0;  // after this round
    double delta_omega = 0.0;     // control mismatch used in this round (round 0: prior error)
    bool capped = false;          // T_n shortened by the phase-wrap or coherence cap
};

struct AdaptiveTrajectory {
    std::vector<AdaptiveRound> iterations;
    std::uint64_t shots_per_round = 0;

    [[nodiscard]] double total_time() const {
        double t = 0.0;
        for (const auto& r : iterations) t += r.T;
        return static_cast<double>(shots_per_round) * t;
    }

    /// N · I of the last round.
    [[nodiscard]] double total_information() const {
        return iterations.empty() ? 0.0 : static_cast<double>(shots_per_round) * iterations.back().info;
    }

    [[nodiscard]] int controlled_rounds() const { return static_cast<int>(iterations.size()) - 1; }
};

struct AdaptiveOptions {
    SimulationMode mode = SimulationMode::Sampled;
    std::uint64_t shots_per_round = 100;  // N, per quadrature record
    std::optional<int> rounds;            // controlled rounds after the crude one
    std::optional<double> time_budget;    // cap on N·ΣT_n (μs)
    std::uint64_t seed = 0;
    NoiseParams noise;
    double initial_T = 1.25;            // crude uncontrolled Ramsey time
    std::optional<double> omega_guess;  // prior for the crude round
    bool phase_wrap_cap = true;
    bool coherence_cap = true;  // T_n <= 2 T2*, the peak of T⁴ e^(−2T/T2*)
    int max_rounds = 64;
};

namespace detail {

// Solves model(ω') ≡ measured (mod 2π) on the branch closest to the model at
// `guess` with Newton steps confined to half a fringe around the guess. A
// step that would leave the window stops halfway to its edge.
template <class Model, class Slope>
double invert_phase(double measured, double guess, Model&& model, Slope&& slope) {
    const double target = nearest_branch(measured, model(guess));
    const double s0 = slope(guess);
    if (s0 == 0.0 || !std::isfinite(s0)) throw Error(ErrorCode::SingularEstimate, "phase slope vanished");
    const double half = kPi / std::abs(s0);
    const double lo = std::max(guess - half, 0.5 * guess);
    const double hi = guess + half;
    double w = guess;
    for (int it = 0; it < 60; ++it) {
        const double s = slope(w);
        if (s == 0.0 || !std::isfinite(s)) break;
        double next = w - (model(w) - target) / s;
        if (next < lo) next = 0.5 * (w + lo);
        if (next > hi) next = 0.5 * (w + hi);
        const double step = next - w;
        w = next;
        if (std::abs(step) <= 1e-13 * w) break;
    }
    return w;
}

}  // namespace detail

/// Runs the adaptive schedule against a known true drive.
///
/// Noiseless mode replaces each estimate by truth + 1/√(N·I) (the control
/// mismatch equals the Cramér–Rao deviation) and scores each round with the
/// leading-order mismatch formula, so the trajectory follows iteration_info.
/// It stops early once a round would not add information.
///
/// Sampled mode measures both quadratures with N shots each, inverts the
/// model phase around the previous estimate and scores each round with the
/// generator integral of the mismatched schedule. It stops before a round
/// whose matched information A²T⁴/π² times the squared visibility would not
/// exceed the previous round's. With `phase_wrap_cap`, T_n
/// is shortened so the prior phase spread (A T²/π)·σ stays within π/2.
///
/// With finite T2* and `coherence_cap`, T_n never exceeds 2 T2* in either mode.
inline AdaptiveTrajectory adaptive_loop(const DriveParams& truth, const AdaptiveOptions& options) {
    truth.validate();
    options.noise.validate();
    detail::require(options.shots_per_round >= 1, ErrorCode::InvalidArgument, "N per round must be >= 1");
    detail::require(options.rounds.has_value() || options.time_budget.has_value(), ErrorCode::InvalidArgument,
                    "adaptive loop needs a round count or a time budget");
    detail::require(options.initial_T > 0.0, ErrorCode::InvalidArgument, "initial time must be > 0");
    detail::require(truth.amplitude > 0.0, ErrorCode::InvalidArgument, "adaptive loop needs A > 0");

    const double shots = static_cast<double>(options.shots_per_round);
    const double A = truth.amplitude;
    const bool noiseless = options.mode == SimulationMode::Noiseless;
    auto visibility2 = [&](double T) {
        const double v = options.noise.contrast * decoherence_envelope(T, options.noise);
        return v * v;
    };
    auto within_budget = [&](double elapsed, double T) {
        return !options.time_budget || shots * (elapsed + T) <= *options.time_budget;
    };

    AdaptiveTrajectory traj;
    traj.shots_per_round = options.shots_per_round;

    // Round 0: crude uncontrolled Ramsey.
    const double T0 = options.initial_T;
    detail::require(within_budget(0.0, T0), ErrorCode::InvalidArgument, "time budget smaller than the first round");
    ProtocolSpec crude;
    crude.kind = ProtocolKind::RamseyUncontrolled;
    crude.drive = truth;
    crude.T = T0;
    crude.noise = options.noise;
    const double guess = options.omega_guess.value_or(truth.omega);

    auto measure = [&](const ProtocolSpec& spec, double ref, std::uint64_t seed) {
        ProtocolSpec a = spec;
        a.readout_phase = ref;
        ProtocolSpec b = spec;
        b.readout_phase = ref + 0.5 * kPi;
        const auto ra = sample_outcomes(excitation_probability(a), options.shots_per_round, derive_seed(seed, 0));
        const auto rb = sample_outcomes(excitation_probability(b), options.shots_per_round, derive_seed(seed, 1));
        return ref + estimate_phase(ra, rb).phase;
    };

    AdaptiveRound r0;
    r0.n = 0;
    r0.T = T0;
    r0.delta_omega = guess - truth.omega;
    r0.info = protocol_qfi(crude).value * visibility2(T0);
    detail::require(r0.info > 0.0, ErrorCode::SingularEstimate, "crude round carries no information");
    if (noiseless) {
        r0.omega_estimate = truth.omega + 1.0 / std::sqrt(shots * r0.info);
    } else {
        auto model = [&](double w) {
            ProtocolSpec s = crude;
            s.drive = truth.with_omega(w);
            return protocol_phase(s);
        };
        auto slope = [&](double w) {
            ProtocolSpec s = crude;
            s.drive = truth.with_omega(w);
            return protocol_slope(s);
        };
        const double phi = measure(crude, model(guess) - 0.5 * kPi, derive_seed(options.seed, 0));
        r0.omega_estimate = detail::invert_phase(phi, guess, model, slope);
    }
    traj.iterations.push_back(r0);

    double elapsed = T0;
    const int limit = options.rounds.value_or(options.max_rounds);
    for (int n = 1; n <= limit && n <= options.max_rounds; ++n) {
        const AdaptiveRound& prev = traj.iterations.back();
        AdaptiveRound round;
        round.n = n;
        round.T = std::sqrt(prev.info);
        round.delta_omega = prev.omega_estimate - truth.omega;
        if (!noiseless && options.phase_wrap_cap) {
            const double sigma = 1.0 / std::sqrt(shots * prev.info);
            const double cap = kPi / std::sqrt(2.0 * A * sigma);
            if (round.T > cap) {
                round.T = cap;
                round.capped = true;
            }
        }
        if (options.coherence_cap && std::isfinite(options.noise.t2_star) && round.T > 2.0 * options.noise.t2_star) {
            round.T = 2.0 * options.noise.t2_star;
            round.capped = true;
        }
        if (!std::isfinite(round.T) || !within_budget(elapsed, round.T)) break;
        if (!noiseless && !(qfi_freq_mismatch(A, round.T, 0.0).value * visibility2(round.T) > prev.info)) break;

        ProtocolSpec spec;
        spec.kind = ProtocolKind::FrequencyOptimal;
        spec.drive = truth;
        spec.T = round.T;
        spec.noise = options.noise;
        spec.control = truth.with_omega(prev.omega_estimate);

        if (noiseless) {
            round.info = qfi_freq_mismatch(A, round.T, round.delta_omega).value * visibility2(round.T);
            if (!(round.info > prev.info) || !std::isfinite(round.info)) break;
            round.omega_estimate = truth.omega + 1.0 / std::sqrt(shots * round.info);
        } else {
            round.info = qfi_generator(truth, schedule_for(spec), round.T).value * visibility2(round.T);
            auto model = [&](double w) {
                ProtocolSpec s = spec;
                s.drive = truth.with_omega(w);
                return protocol_phase(s);
            };
            auto slope = [&](double w) {
                ProtocolSpec s = spec;
                s.drive = truth.with_omega(w);
                return protocol_slope(s);
            };
            const double guess_n = prev.omega_estimate;
            const double phi =
                measure(spec, model(guess_n) - 0.5 * kPi, derive_seed(options.seed, static_cast<std::uint64_t>(n)));
            round.omega_estimate = detail::invert_phase(phi, guess_n, model, slope);
            if (!(round.info > 0.0)) {
                traj.iterations.push_back(round);
                break;
            }
        }
        elapsed += round.T;
        traj.iterations.push_back(round);
    }
    return traj;
}

}  // namespace qfilab
