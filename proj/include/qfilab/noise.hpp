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

// Decoherence, projective readout and projection-noise statistics.

#pragma once

#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/fisher.hpp"
#include "qfilab/linalg.hpp"
#include "qfilab/rng.hpp"

#include <boost/random/binomial_distribution.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace qfilab {

inline constexpr double kNoDecay = std::numeric_limits<double>::infinity();

struct NoiseParams {
    double t1 = kNoDecay;       // μs
    double t2_star = kNoDecay;  // μs, total coherence decay time
    double contrast = 1.0;      // symmetric readout contrast C

    static NoiseParams ideal() { return {}; }

    /// Transmon values: T1 = 14 μs, T2* = 4 μs, 80% readout fidelity.
    static NoiseParams transmon() { return {14.0, 4.0, 0.8}; }

    void validate() const {
        detail::require(t1 > 0.0, ErrorCode::InvalidArgument, "T1 must be > 0");
        detail::require(t2_star > 0.0, ErrorCode::InvalidArgument, "T2* must be > 0");
        detail::require(contrast >= 0.0 && contrast <= 1.0, ErrorCode::InvalidArgument,
                        "readout contrast must lie in [0, 1]");
    }

    /// 1/T2* >= 1/(2 T1): the pure-dephasing rate is non-negative.
    [[nodiscard]] bool lindblad_physical() const { return 1.0 / t2_star >= 0.5 / t1 - 1e-15; }
};

enum class DephasingShape { Exponential, Gaussian };

inline double decoherence_envelope(double T, const NoiseParams& noise,
                                   DephasingShape shape = DephasingShape::Exponential) {
    detail::require(T >= 0.0, ErrorCode::InvalidArgument, "time must be >= 0");
    noise.validate();
    const double x = T / noise.t2_star;
    return shape == DephasingShape::Exponential ? std::exp(-x) : std::exp(-x * x);
}

struct DensityMatrix {
    Mat2 rho = Mat2::Identity() * 0.5;

    static DensityMatrix from_pure(const PureState& s) {
        const Vec2 v = s.vector();
        return {v * v.adjoint()};
    }

    static DensityMatrix plus() { return from_pure(PureState::plus()); }

    [[nodiscard]] double trace() const { return rho.trace().real(); }

    /// ⟨1|ρ|0⟩; its argument is the relative phase φ and 2|ρ₁₀| the visibility.
    [[nodiscard]] Complex coherence() const { return rho(1, 0); }

    [[nodiscard]] double min_eigenvalue() const {
        const double a = rho(0, 0).real();
        const double d = rho(1, 1).real();
        const double off = std::abs(rho(1, 0));
        return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + off * off);
    }

    [[nodiscard]] double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

    [[nodiscard]] DensityMatrix conjugated(const Mat2& u) const { return {u * rho * u.adjoint()}; }
};

namespace detail {

// Amplitude damping toward |0⟩ plus dephasing, exact over dt. Commutes with
// any σz Hamiltonian.
inline void dissipate(Mat2& rho, double dt, const NoiseParams& noise) {
    if (dt <= 0.0) return;
    const double relax = std::exp(-dt / noise.t1);
    const double decay = std::exp(-dt / noise.t2_star);
    const Complex excited = rho(1, 1) * relax;
    rho(0, 0) += rho(1, 1) - excited;
    rho(1, 1) = excited;
    rho(1, 0) *= decay;
    rho(0, 1) *= decay;
}

}  // namespace detail

/// Lab-frame density matrix after the protocol, starting from `initial`.
///
/// Between ideal pulses the σz rotation and the decay channel are applied in
/// closed form. Inside finite pulse windows each step of size <= `step` is
/// split as decay(h/2) · U(h) · decay(h/2).
inline DensityMatrix evolve_density(const DriveParams& drive, const PulseSchedule& schedule, double T,
                                    const NoiseParams& noise,
                                    const DensityMatrix& initial = DensityMatrix::plus(),
                                    double step = 1e-3) {
    drive.validate();
    schedule.validate(T);
    noise.validate();
    if (!noise.lindblad_physical()) {
        throw Error(ErrorCode::Unphysical, "noise parameters need 1/T2* >= 1/(2 T1)");
    }
    detail::require(step > 0.0, ErrorCode::InvalidArgument, "propagation step must be > 0");

    const double A = drive.amplitude;
    const double w = drive.omega;
    const double th = drive.theta;
    Mat2 rho = initial.rho;

    auto free_segment = [&](double a, double b) {
        if (b <= a) return;
        rho = z_phase(A * (std::cos(w * a + th) - std::cos(w * b + th)) / w) * rho *
              z_phase(A * (std::cos(w * a + th) - std::cos(w * b + th)) / w).adjoint();
        detail::dissipate(rho, b - a, noise);
    };

    if (schedule.instantaneous_pulses()) {
        const Mat2 pulse = pi_rotation(schedule.axis);
        double t = 0.0;
        for (double c : schedule.centers) {
            free_segment(t, c);
            rho = pulse * rho * pulse.adjoint();
            t = c;
        }
        free_segment(t, T);
    } else {
        detail::require(step <= schedule.duration / 10.0 * (1.0 + 1e-12), ErrorCode::StepTooLarge,
                        "propagation step must be <= pulse_duration / 10");
        const bool along_x = schedule.axis == PulseAxis::X;
        const double rabi = schedule.rabi_amplitude;
        const double half = 0.5 * schedule.duration;
        double t = 0.0;
        for (double c : schedule.centers) {
            const double start = std::clamp(c - half, 0.0, T);
            const double end = std::clamp(c + half, 0.0, T);
            free_segment(t, start);
            if (end > start) {
                const auto n = std::max(1LL, static_cast<long long>(std::ceil((end - start) / step - 1e-9)));
                const double h = (end - start) / static_cast<double>(n);
                for (long long k = 0; k < n; ++k) {
                    const double tm = start + (static_cast<double>(k) + 0.5) * h;
                    const Mat2 u = su2_exp(along_x ? rabi : 0.0, along_x ? 0.0 : rabi,
                                           A * std::sin(w * tm + th), h);
                    detail::dissipate(rho, 0.5 * h, noise);
                    rho = u * rho * u.adjoint();
                    detail::dissipate(rho, 0.5 * h, noise);
                }
            }
            t = end;
        }
        free_segment(t, T);
    }
    return {rho};
}

/// Undo the ideal pulse rotations so the coherence phase is the accumulated
/// toggling-frame phase.
inline DensityMatrix to_toggling_frame(const DensityMatrix& rho, const PulseSchedule& schedule) {
    return rho.conjugated(frame_rotation(schedule).adjoint().matrix());
}

/// Excited-state probability after the closing π/2 pulse with reference
/// phase `readout_phase`: P = ½ − C·Re(ρ₁₀ e^{−iφ_ref}), which equals
/// ½[1 − C v cos(φ − φ_ref)].
inline double readout_probability(const DensityMatrix& rho, double readout_phase, double contrast) {
    const double p = 0.5 - contrast * (rho.coherence() * std::polar(1.0, -readout_phase)).real();
    return std::clamp(p, 0.0, 1.0);
}

struct MeasurementRecord {
    std::uint64_t n = 0;
    std::uint64_t excited = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] double fraction() const { return static_cast<double>(excited) / static_cast<double>(n); }
};

/// Binomial projection noise: `n` shots with excitation probability `p`.
inline MeasurementRecord sample_outcomes(double p, std::uint64_t n, std::uint64_t seed) {
    detail::require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "probability must lie in [0, 1]");
    detail::require(n >= 1, ErrorCode::InvalidArgument, "shot count must be >= 1");
    MeasurementRecord rec{n, 0, seed};
    if (p == 0.0) return rec;
    if (p == 1.0) {
        rec.excited = n;
        return rec;
    }
    Xoshiro256 engine(seed);
    boost::random::binomial_distribution<std::int64_t, double> dist(static_cast<std::int64_t>(n), p);
    rec.excited = static_cast<std::uint64_t>(dist(engine));
    return rec;
}

struct PhaseEstimate {
    double phase = 0.0;   // φ − φ_ref, in (−π, π]
    double std_error = 0.0;  // binomial propagation
};

/// Two-quadrature inversion. `in_phase` was read out at φ_ref, `quadrature`
/// at φ_ref + π/2, so 1 − 2P gives (a cos δ, a sin δ) with δ = φ − φ_ref.
inline PhaseEstimate estimate_phase(const MeasurementRecord& in_phase, const MeasurementRecord& quadrature) {
    detail::require(in_phase.n > 0 && quadrature.n > 0, ErrorCode::InvalidArgument,
                    "records must contain at least one shot");
    const double p_in = in_phase.fraction();
    const double p_q = quadrature.fraction();
    const double x = 1.0 - 2.0 * p_in;
    const double y = 1.0 - 2.0 * p_q;
    const double r2 = x * x + y * y;
    if (r2 == 0.0) throw Error(ErrorCode::SingularEstimate, "both quadratures sit at P = 1/2");
    const double var_x = 4.0 * p_in * (1.0 - p_in) / static_cast<double>(in_phase.n);
    const double var_y = 4.0 * p_q * (1.0 - p_q) / static_cast<double>(quadrature.n);
    return {std::atan2(y, x), std::sqrt((y * y * var_x + x * x * var_y) / (r2 * r2))};
}

struct CfiPoint {
    double T = 0.0;
    double cfi = 0.0;
    double probability = 0.0;
    double dp_domega = 0.0;
};

using ScheduleBuilder = std::function<PulseSchedule(const DriveParams&, double T)>;

/// Classical Fisher information of the decohered binary readout versus T,
/// at the readout phase that maximises it (φ − φ_ref = π/2). The exponential
/// model goes through `evolve_density`; the Gaussian one through the envelope.
inline std::vector<CfiPoint> cfi_vs_time_with_decoherence(const DriveParams& drive, const ScheduleBuilder& builder,
                                                          const NoiseParams& noise, std::span<const double> times,
                                                          DephasingShape shape = DephasingShape::Exponential) {
    std::vector<CfiPoint> out;
    out.reserve(times.size());
    const double h = 1e-5 * drive.omega;
    for (double T : times) {
        const PulseSchedule schedule = builder(drive, T);
        auto coherence_at = [&](double omega) -> Complex {
            const DriveParams d = drive.with_omega(omega);
            if (shape == DephasingShape::Exponential) {
                return to_toggling_frame(evolve_density(d, schedule, T, noise), schedule).coherence();
            }
            return 0.5 * decoherence_envelope(T, noise, shape) * std::polar(1.0, accumulated_phase(d, schedule, T));
        };
        auto probability = [&](Complex c, double ref) {
            return std::clamp(0.5 - noise.contrast * (c * std::polar(1.0, -ref)).real(), 0.0, 1.0);
        };
        const Complex c0 = coherence_at(drive.omega);
        const double ref = std::arg(c0) - 0.5 * kPi;
        const double p = probability(c0, ref);
        const double dp =
            (probability(coherence_at(drive.omega + h), ref) - probability(coherence_at(drive.omega - h), ref)) /
            (2.0 * h);
        out.push_back({T, cfi_binary(p, dp), p, dp});
    }
    return out;
}

}  // namespace qfilab
