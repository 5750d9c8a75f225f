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

#include <cmath>
#include <functional>
#include <string_view>

namespace qfilab {

enum class QfiMethod { Generator, StateDerivative, Bures, SlopeFit, ClosedForm };

constexpr std::string_view to_string(QfiMethod m) noexcept {
    switch (m) {
        case QfiMethod::Generator: return "generator";
        case QfiMethod::StateDerivative: return "state_derivative";
        case QfiMethod::Bures: return "bures";
        case QfiMethod::SlopeFit: return "slope_fit";
        case QfiMethod::ClosedForm: return "closed_form";
    }
    return "unknown";
}

/// Fisher information about ω in μs² (or about A, dimensionless time²).
struct QfiResult {
    double value = 0.0;
    QfiMethod method = QfiMethod::Generator;
    // set when a truncated expansion went negative and was clamped to zero
    bool clamped = false;
};

/// Squared generator-eigenvalue integral: (∫₀ᵀ (μ₊ − μ₋) f dt)² = (dφ/dω)².
inline QfiResult qfi_generator(const DriveParams& drive, const PulseSchedule& schedule, double T) {
    const double slope = phase_slope_frequency(drive, schedule, T);
    return {slope * slope, QfiMethod::Generator};
}

using StateMap = std::function<PureState(double omega)>;

/// ω ↦ final state of the ideal-pulse protocol started in (|0⟩+|1⟩)/√2.
/// The schedule stays fixed while the signal frequency varies.
inline StateMap protocol_state_map(const DriveParams& drive, const PulseSchedule& schedule, double T) {
    return [drive, schedule, T](double omega) {
        const Unitary2 u = propagate_unitary(drive.with_omega(omega), schedule, T, T);
        return u.apply(PureState::plus());
    };
}

namespace detail {

inline double state_derivative_qfi(const StateMap& map, double omega, double h) {
    const PureState lo = map(omega - h);
    const PureState hi = map(omega + h);
    const PureState mid = map(omega);
    if (std::abs(inner(lo, hi)) <= 0.99) {
        throw Error(ErrorCode::StepTooLarge, "finite-difference step too large: overlap <= 0.99");
    }
    const Vec2 d = (hi.vector() - lo.vector()) / (2.0 * h);
    const Vec2 psi = mid.vector();
    const double dd = d.squaredNorm();
    const double overlap = std::norm(psi.dot(d));
    return std::max(0.0, 4.0 * (dd - overlap));
}

}  // namespace detail

/// 4(⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²) with a central difference of step `d_omega`.
/// Unless disabled, the step is halved once and the two results must agree
/// to 1e-4 relative.
inline QfiResult qfi_state_derivative(const StateMap& map, double omega, double d_omega,
                                      bool richardson_check = true) {
    detail::require(d_omega > 0.0 && std::isfinite(d_omega), ErrorCode::InvalidArgument,
                    "finite-difference step must be > 0");
    if (!map(omega).is_normalized()) {
        throw Error(ErrorCode::Unphysical, "state map returned an unnormalized state");
    }
    const double full = detail::state_derivative_qfi(map, omega, d_omega);
    if (richardson_check) {
        const double half = detail::state_derivative_qfi(map, omega, 0.5 * d_omega);
        const double scale = std::max(std::abs(full), std::abs(half));
        if (std::abs(full - half) > 1e-4 * scale + 1e-10) {
            throw Error(ErrorCode::StepTooLarge, "state-derivative QFI did not converge under step halving");
        }
    }
    return {full, QfiMethod::StateDerivative};
}

/// 1 − |⟨a|b⟩| for normalized qubit states, via |a₀b₁ − a₁b₀|² to avoid
/// cancellation when the states are nearly identical.
inline double one_minus_fidelity_amplitude(const PureState& a, const PureState& b) {
    const double ov = std::abs(inner(a, b));
    const double cross = std::norm(a.amp0 * b.amp1 - a.amp1 * b.amp0);
    return cross / (1.0 + ov);
}

/// Bures-distance QFI: 4 ds²/dω² with ds² = 2(1 − |⟨ψ_a|ψ_b⟩|).
inline QfiResult qfi_bures(const PureState& psi_a, const PureState& psi_b, double d_omega) {
    detail::require(d_omega != 0.0 && std::isfinite(d_omega), ErrorCode::InvalidArgument,
                    "Bures QFI needs a nonzero frequency step");
    detail::require(psi_a.is_normalized(1e-10) && psi_b.is_normalized(1e-10), ErrorCode::Unphysical,
                    "Bures QFI needs normalized states");
    return {8.0 * one_minus_fidelity_amplitude(psi_a, psi_b) / (d_omega * d_omega), QfiMethod::Bures};
}

/// Classical Fisher information of a two-outcome measurement.
inline double cfi_binary(double p, double dp_domega) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorCode::DomainError, "binary Fisher information undefined at P = 0 or 1");
    }
    return dp_domega * dp_domega / (p * (1.0 - p));
}

/// Leading-order QFI under a control-frequency mismatch:
/// A²T⁴/π² (1 − Δω²T²/2), clamped at zero.
inline QfiResult qfi_freq_mismatch(double amplitude, double T, double delta_omega) {
    const double factor = 1.0 - 0.5 * delta_omega * delta_omega * T * T;
    const double base = amplitude * amplitude * std::pow(T, 4) / (kPi * kPi);
    if (factor < 0.0) return {0.0, QfiMethod::ClosedForm, true};
    return {base * factor, QfiMethod::ClosedForm};
}

/// QFI for N_half π pulses placed with a phase mismatch Δθ:
/// [πN²A cosΔθ/ω² + 2N(Δφ cosΔθ − sinΔθ)/ω²]².
///
/// `delta_phi` is an experimental extra parameter (default 0). Setting it
/// equal to Δθ and scaling the second term by A gives the exact integral for
/// pulses delayed by Δθ/ω; see `qfi_phase_mismatch_exact`.
inline QfiResult qfi_phase_mismatch(double amplitude, double omega, int n_half, double delta_theta,
                                    double delta_phi = 0.0) {
    detail::require(n_half >= 1, ErrorCode::InvalidArgument, "pulse count must be >= 1");
    detail::require(omega > 0.0, ErrorCode::InvalidArgument, "frequency must be > 0");
    const double n = n_half;
    const double w2 = omega * omega;
    const double c = std::cos(delta_theta);
    const double s = std::sin(delta_theta);
    const double root = kPi * n * n * amplitude * c / w2 + 2.0 * n * (delta_phi * c - s) / w2;
    return {root * root, QfiMethod::ClosedForm};
}

/// Exact slope² for N_half pulses delayed by Δθ/ω relative to the antinodes of
/// sin(ωt) over T = N_half·π/ω (|Δθ| < π/2).
inline QfiResult qfi_phase_mismatch_exact(double amplitude, double omega, int n_half, double delta_theta) {
    detail::require(n_half >= 1, ErrorCode::InvalidArgument, "pulse count must be >= 1");
    const double n = n_half;
    const double c = std::cos(delta_theta);
    const double s = std::sin(delta_theta);
    const double root =
        amplitude / (omega * omega) * (kPi * n * n * c + 2.0 * n * (delta_theta * c - s));
    return {root * root, QfiMethod::ClosedForm};
}

/// Small-mismatch reduction factor of the leading term, 1 − Δθ².
inline double phase_mismatch_reduction(double delta_theta) { return 1.0 - delta_theta * delta_theta; }

/// Cramér–Rao variance bound 1/(vI).
inline double cramer_rao(double information, double repetitions) {
    if (!(information > 0.0)) throw Error(ErrorCode::DomainError, "Fisher information must be > 0");
    detail::require(repetitions >= 1.0, ErrorCode::InvalidArgument, "repetition count must be >= 1");
    return 1.0 / (repetitions * information);
}

}  // namespace qfilab
