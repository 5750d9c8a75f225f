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

// Signal Hamiltonian H(t) = (A/2) sin(ωt + θ) σz in the qubit frame, π-pulse
// control schedules, and the exact phase/slope integrals they induce.
//
// Units: times in μs, angular frequencies and amplitudes in rad/μs.

#pragma once

#include "qfilab/error.hpp"
#include "qfilab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace qfilab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any phase onto [0, 2π).
inline double normalize_phase(double phase) {
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

namespace detail {

// Relative tolerance used when deciding whether a pulse time sits on a
// protocol boundary.
inline constexpr double kTimeTolerance = 1e-12;

inline double time_slack(double T) { return kTimeTolerance * std::max(1.0, std::abs(T)); }

}  // namespace detail

struct DriveParams {
    double amplitude = 0.0;  // A
    double omega = 1.0;      // ω
    double theta = 0.0;      // θ, kept in [0, 2π)

    static DriveParams make(double amplitude, double omega, double theta = 0.0) {
        DriveParams d{amplitude, omega, normalize_phase(theta)};
        d.validate();
        return d;
    }

    void validate() const {
        detail::require(std::isfinite(amplitude) && amplitude >= 0.0, ErrorCode::InvalidArgument,
                        "drive amplitude must be finite and >= 0");
        detail::require(std::isfinite(omega) && omega > 0.0, ErrorCode::InvalidArgument,
                        "drive frequency must be finite and > 0");
        detail::require(theta >= 0.0 && theta < kTwoPi, ErrorCode::InvalidArgument,
                        "drive phase must lie in [0, 2pi)");
    }

    [[nodiscard]] DriveParams with_omega(double w) const { return make(amplitude, w, theta); }
    [[nodiscard]] DriveParams with_amplitude(double a) const { return make(a, omega, theta); }
    [[nodiscard]] DriveParams with_theta(double t) const { return make(amplitude, omega, t); }

    [[nodiscard]] double period() const { return kTwoPi / omega; }
};

enum class PulseAxis { X, Y };

/// Ordered π-pulse centers plus the pulse shape shared by every pulse.
/// A zero duration means ideal instantaneous rotations.
struct PulseSchedule {
    std::vector<double> centers;
    PulseAxis axis = PulseAxis::Y;
    double duration = 0.0;
    double rabi_amplitude = 0.0;

    static PulseSchedule instantaneous(std::vector<double> centers, PulseAxis axis = PulseAxis::Y) {
        PulseSchedule s;
        s.centers = std::move(centers);
        s.axis = axis;
        return s;
    }

    /// Same centers, square pulses of the given duration with Ω·τ = π.
    [[nodiscard]] PulseSchedule with_finite_pulses(double pulse_duration) const {
        detail::require(pulse_duration > 0.0, ErrorCode::InvalidArgument,
                        "finite pulse duration must be > 0");
        PulseSchedule s = *this;
        s.duration = pulse_duration;
        s.rabi_amplitude = kPi / pulse_duration;
        return s;
    }

    /// Every center moved by `offset`; centers leaving (0, T] are dropped.
    [[nodiscard]] PulseSchedule shifted(double offset, double T) const {
        PulseSchedule s = *this;
        s.centers.clear();
        const double slack = detail::time_slack(T);
        for (double c : centers) {
            double t = c + offset;
            if (std::abs(t - T) <= slack) t = T;
            if (t > slack && t <= T) s.centers.push_back(t);
        }
        return s;
    }

    [[nodiscard]] std::size_t size() const noexcept { return centers.size(); }
    [[nodiscard]] bool empty() const noexcept { return centers.empty(); }
    [[nodiscard]] bool instantaneous_pulses() const noexcept { return duration == 0.0; }

    /// Pulses sitting exactly at the protocol end. They flip the final state
    /// but contribute nothing to the accumulated integrals.
    [[nodiscard]] std::size_t pulses_at_end(double T) const {
        const double slack = detail::time_slack(T);
        return static_cast<std::size_t>(std::count_if(
            centers.begin(), centers.end(), [&](double c) { return std::abs(c - T) <= slack; }));
    }

    void validate(double T) const {
        detail::require(std::isfinite(T) && T > 0.0, ErrorCode::InvalidArgument,
                        "protocol duration must be > 0");
        const double slack = detail::time_slack(T);
        for (std::size_t i = 0; i < centers.size(); ++i) {
            const double c = centers[i];
            if (!std::isfinite(c) || c < -slack || c > T + slack) {
                throw Error(ErrorCode::ScheduleOutOfRange, "pulse center outside [0, T]");
            }
            if (i > 0 && !(c > centers[i - 1])) {
                throw Error(ErrorCode::InvalidArgument, "pulse centers must be strictly increasing");
            }
        }
        detail::require(duration >= 0.0 && std::isfinite(duration), ErrorCode::InvalidArgument,
                        "pulse duration must be >= 0");
        if (duration > 0.0) {
            const double area = rabi_amplitude * duration;
            detail::require(std::abs(area - kPi) <= 1e-9 * kPi, ErrorCode::InvalidArgument,
                            "finite pulses must satisfy rabi_amplitude * duration = pi");
            for (std::size_t i = 1; i < centers.size(); ++i) {
                if (centers[i] - centers[i - 1] < duration * (1.0 - 1e-12)) {
                    throw Error(ErrorCode::OverlappingPulses, "finite pulses overlap");
                }
            }
        }
    }
};

/// f(t) = (-1)^(number of pulse centers <= t).
class SignFunction {
public:
    explicit SignFunction(const PulseSchedule& schedule) : centers_(schedule.centers) {}

    [[nodiscard]] int operator()(double t) const {
        const auto flips = std::upper_bound(centers_.begin(), centers_.end(), t) - centers_.begin();
        return (flips % 2 == 0) ? 1 : -1;
    }

    [[nodiscard]] std::size_t flips() const noexcept { return centers_.size(); }

private:
    std::vector<double> centers_;
};

struct PureState {
    Complex amp0{1.0, 0.0};
    Complex amp1{0.0, 0.0};

    static PureState plus() {
        const double r = std::numbers::sqrt2 / 2.0;
        return {Complex{r, 0.0}, Complex{r, 0.0}};
    }

    static PureState from_vector(const Vec2& v) { return {v(0), v(1)}; }

    [[nodiscard]] Vec2 vector() const { return Vec2{amp0, amp1}; }
    [[nodiscard]] double norm_squared() const { return std::norm(amp0) + std::norm(amp1); }
    [[nodiscard]] bool is_normalized(double tol = 1e-12) const {
        return std::abs(norm_squared() - 1.0) <= tol;
    }

    /// Phase φ of |1⟩ relative to |0⟩, i.e. arg(amp1 · conj(amp0)).
    [[nodiscard]] double relative_phase() const { return std::arg(amp1 * std::conj(amp0)); }
};

inline Complex inner(const PureState& a, const PureState& b) {
    return std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
}

class Unitary2 {
public:
    Unitary2() : m_(Mat2::Identity()) {}

    explicit Unitary2(const Mat2& m, double tol = 1e-10) : m_(m) {
        const Mat2 gram = m_.adjoint() * m_;
        const Mat2 diff = gram - Mat2::Identity();
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                if (std::abs(diff(i, j)) > tol) {
                    throw Error(ErrorCode::Unphysical, "matrix is not unitary");
                }
            }
        }
    }

    [[nodiscard]] const Mat2& matrix() const noexcept { return m_; }
    [[nodiscard]] Unitary2 adjoint() const { return Unitary2(m_.adjoint()); }
    [[nodiscard]] PureState apply(const PureState& s) const {
        return PureState::from_vector(m_ * s.vector());
    }

    friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) { return Unitary2(a.m_ * b.m_); }

private:
    Mat2 m_;
};

/// Ideal π rotation about the pulse axis, exp(-iπσ/2) = -iσ.
inline Mat2 pi_rotation(PulseAxis axis) {
    return -kI * (axis == PulseAxis::X ? pauli::x() : pauli::y());
}

/// Product of all ideal pulse rotations, R^k. Mapping a lab-frame state
/// through its adjoint yields the toggling-frame state.
inline Unitary2 frame_rotation(const PulseSchedule& schedule) {
    Mat2 r = Mat2::Identity();
    const Mat2 p = pi_rotation(schedule.axis);
    for (std::size_t i = 0; i < schedule.size(); ++i) r = p * r;
    return Unitary2(r);
}

// Antinodes: ωt + θ = π/2 + nπ with t in (0, T].
inline PulseSchedule antinode_schedule(const DriveParams& drive, double T) {
    drive.validate();
    detail::require(std::isfinite(T) && T > 0.0, ErrorCode::InvalidArgument,
                    "protocol duration must be > 0");
    const double slack = detail::time_slack(T);
    std::vector<double> centers;
    // smallest n with (π/2 + nπ - θ) > 0
    auto n = static_cast<long long>(std::floor((drive.theta - 0.5 * kPi) / kPi));
    for (;; ++n) {
        double t = ((static_cast<double>(n) + 0.5) * kPi - drive.theta) / drive.omega;
        if (t <= slack) continue;
        if (std::abs(t - T) <= slack) t = T;
        if (t > T) break;
        centers.push_back(t);
    }
    return PulseSchedule::instantaneous(std::move(centers));
}

// Nodes: ωt + θ = nπ with t strictly inside (0, T).
inline PulseSchedule node_schedule(const DriveParams& drive, double T) {
    drive.validate();
    detail::require(std::isfinite(T) && T > 0.0, ErrorCode::InvalidArgument,
                    "protocol duration must be > 0");
    const double slack = detail::time_slack(T);
    std::vector<double> centers;
    auto n = static_cast<long long>(std::floor(drive.theta / kPi));
    for (;; ++n) {
        const double t = (static_cast<double>(n) * kPi - drive.theta) / drive.omega;
        if (t <= slack) continue;
        if (t >= T - slack) break;
        centers.push_back(t);
    }
    return PulseSchedule::instantaneous(std::move(centers));
}

namespace detail {

// Sums sign-toggled definite integrals of an antiderivative over [0, T].
// A pulse at exactly T closes the last segment and contributes nothing.
template <class Antiderivative>
double toggled_integral(const PulseSchedule& schedule, double T, Antiderivative&& F) {
    schedule.validate(T);
    double total = 0.0;
    double sign = 1.0;
    double start = 0.0;
    double f_start = F(0.0);
    for (double c : schedule.centers) {
        const double end = std::clamp(c, 0.0, T);
        const double f_end = F(end);
        total += sign * (f_end - f_start);
        sign = -sign;
        start = end;
        f_start = f_end;
    }
    if (start < T) total += sign * (F(T) - f_start);
    return total;
}

}  // namespace detail

/// φ = A ∫₀ᵀ f(t) sin(ωt+θ) dt for ideal pulses.
inline double accumulated_phase(const DriveParams& drive, const PulseSchedule& schedule, double T) {
    drive.validate();
    const double w = drive.omega;
    const double th = drive.theta;
    return drive.amplitude *
           detail::toggled_integral(schedule, T, [&](double t) { return -std::cos(w * t + th) / w; });
}

/// dφ/dω = A ∫₀ᵀ f(t) t cos(ωt+θ) dt, with the pulse times held fixed.
inline double phase_slope_frequency(const DriveParams& drive, const PulseSchedule& schedule, double T) {
    drive.validate();
    const double w = drive.omega;
    const double th = drive.theta;
    return drive.amplitude * detail::toggled_integral(schedule, T, [&](double t) {
               const double u = w * t + th;
               return t * std::sin(u) / w + std::cos(u) / (w * w);
           });
}

/// dφ/dA = ∫₀ᵀ f(t) sin(ωt+θ) dt.
inline double phase_slope_amplitude(const DriveParams& drive, const PulseSchedule& schedule, double T) {
    drive.validate();
    const double w = drive.omega;
    const double th = drive.theta;
    return detail::toggled_integral(schedule, T, [&](double t) { return -std::cos(w * t + th) / w; });
}

enum class FreeEvolution {
    Exact,    // diagonal closed form between pulses
    Stepped,  // midpoint-exponential steps everywhere (independent numeric route)
};

/// Time-ordered propagator of H(t) = (A/2) sin(ωt+θ) σz + (Ω/2) g(t) σ_axis.
///
/// Ideal pulses are applied as exact π rotations. Finite pulses are square
/// windows [c - τ/2, c + τ/2] clipped to [0, T] and integrated with midpoint
/// exponentials of size <= step; `step` must not exceed τ/10.
inline Unitary2 propagate_unitary(const DriveParams& drive, const PulseSchedule& schedule, double T,
                                  double step, FreeEvolution free = FreeEvolution::Exact) {
    drive.validate();
    schedule.validate(T);
    detail::require(std::isfinite(step) && step > 0.0, ErrorCode::InvalidArgument,
                    "propagation step must be > 0");
    if (!schedule.instantaneous_pulses()) {
        detail::require(step <= schedule.duration / 10.0 * (1.0 + 1e-12), ErrorCode::StepTooLarge,
                        "propagation step must be <= pulse_duration / 10");
    }

    const double A = drive.amplitude;
    const double w = drive.omega;
    const double th = drive.theta;
    const bool along_x = schedule.axis == PulseAxis::X;

    auto free_segment = [&](double a, double b) -> Mat2 {
        if (b <= a) return Mat2::Identity();
        if (free == FreeEvolution::Exact) {
            return z_phase(A * (std::cos(w * a + th) - std::cos(w * b + th)) / w);
        }
        const auto n = static_cast<long long>(std::ceil((b - a) / step));
        const double h = (b - a) / static_cast<double>(n);
        Mat2 u = Mat2::Identity();
        for (long long k = 0; k < n; ++k) {
            const double tm = a + (static_cast<double>(k) + 0.5) * h;
            u = su2_exp(0.0, 0.0, A * std::sin(w * tm + th), h) * u;
        }
        return u;
    };

    auto driven_segment = [&](double a, double b) -> Mat2 {
        if (b <= a) return Mat2::Identity();
        const auto n = static_cast<long long>(std::ceil((b - a) / step - 1e-9));
        const double h = (b - a) / static_cast<double>(std::max(1LL, n));
        const double rabi = schedule.rabi_amplitude;
        Mat2 u = Mat2::Identity();
        for (long long k = 0; k < std::max(1LL, n); ++k) {
            const double tm = a + (static_cast<double>(k) + 0.5) * h;
            const double hz = A * std::sin(w * tm + th);
            u = su2_exp(along_x ? rabi : 0.0, along_x ? 0.0 : rabi, hz, h) * u;
        }
        return u;
    };

    Mat2 u = Mat2::Identity();
    double t = 0.0;
    if (schedule.instantaneous_pulses()) {
        const Mat2 pulse = pi_rotation(schedule.axis);
        for (double c : schedule.centers) {
            u = free_segment(t, c) * u;
            u = pulse * u;
            t = c;
        }
        u = free_segment(t, T) * u;
    } else {
        const double half = 0.5 * schedule.duration;
        for (double c : schedule.centers) {
            const double start = std::clamp(c - half, 0.0, T);
            const double end = std::clamp(c + half, 0.0, T);
            u = free_segment(t, start) * u;
            u = driven_segment(start, end) * u;
            t = end;
        }
        u = free_segment(t, T) * u;
    }
    return Unitary2(u);
}

/// Final state from (|0⟩+|1⟩)/√2, mapped back to the toggling frame.
inline PureState toggling_frame_state(const Unitary2& u, const PulseSchedule& schedule) {
    return frame_rotation(schedule).adjoint().apply(u.apply(PureState::plus()));
}

}  // namespace qfilab
