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

// Measurement protocols: uncontrolled Ramsey, antinode-controlled frequency
// estimation, node-controlled amplitude estimation and Rabi spectroscopy,
// plus the slope-fit estimate of the Fisher information.

#pragma once

#include "qfilab/dynamics.hpp"
#include "qfilab/error.hpp"
#include "qfilab/fisher.hpp"
#include "qfilab/noise.hpp"
#include "qfilab/parallel.hpp"
#include "qfilab/regression.hpp"
#include "qfilab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qfilab {

enum class ProtocolKind { RamseyUncontrolled, FrequencyOptimal, AmplitudeOptimal, Rabi };

constexpr std::string_view to_string(ProtocolKind k) noexcept {
    switch (k) {
        case ProtocolKind::RamseyUncontrolled: return "uncontrolled";
        case ProtocolKind::FrequencyOptimal: return "optimal";
        case ProtocolKind::AmplitudeOptimal: return "amplitude";
        case ProtocolKind::Rabi: return "rabi";
    }
    return "unknown";
}

inline ProtocolKind parse_protocol_kind(std::string_view name) {
    if (name == "uncontrolled" || name == "ramsey") return ProtocolKind::RamseyUncontrolled;
    if (name == "optimal" || name == "controlled") return ProtocolKind::FrequencyOptimal;
    if (name == "amplitude") return ProtocolKind::AmplitudeOptimal;
    if (name == "rabi") return ProtocolKind::Rabi;
    throw Error(ErrorCode::InvalidArgument, "unknown protocol kind: " + std::string(name));
}

enum class SweepParameter { Omega, Amplitude };
enum class SimulationMode { Sampled, Noiseless };

/// Optimal Rabi detuning ω − ω₀, placing T√(A²+Δ²) at AT + π/2.
inline double rabi_optimal_detuning(double amplitude, double T) {
    const double target = amplitude + 0.5 * kPi / T;
    return std::sqrt(target * target - amplitude * amplitude);
}

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::FrequencyOptimal;
    DriveParams drive;  // the true signal
    double T = 1.0;
    // Reference phase of the closing π/2 pulse. Unset means the steepest
    // point of the fringe, φ − φ_ref = π/2.
    std::optional<double> readout_phase;
    NoiseParams noise;
    DephasingShape shape = DephasingShape::Exponential;
    // Drive the controller believes in; pulses are placed from it. Unset
    // means matched control. For Rabi its frequency is the drive frequency ω₀.
    std::optional<DriveParams> control;
    double pulse_offset = 0.0;  // constant delay of the pulse train (μs)

    void validate() const {
        drive.validate();
        noise.validate();
        detail::require(std::isfinite(T) && T > 0.0, ErrorCode::InvalidArgument, "protocol duration must be > 0");
        if (control) control->validate();
    }

    [[nodiscard]] DriveParams control_drive() const {
        if (control) return *control;
        if (kind == ProtocolKind::Rabi) {
            const double w0 = drive.omega - rabi_optimal_detuning(drive.amplitude, T);
            detail::require(w0 > 0.0, ErrorCode::InvalidArgument, "Rabi drive frequency would be <= 0");
            return DriveParams::make(drive.amplitude, w0, drive.theta);
        }
        return drive;
    }

    [[nodiscard]] ProtocolSpec with_parameter(SweepParameter p, double value) const {
        ProtocolSpec s = *this;
        s.control = control_drive();
        s.drive = p == SweepParameter::Omega ? drive.with_omega(value) : drive.with_amplitude(value);
        return s;
    }
};

inline PulseSchedule schedule_for(const ProtocolSpec& spec) {
    spec.validate();
    PulseSchedule s;
    switch (spec.kind) {
        case ProtocolKind::FrequencyOptimal: s = antinode_schedule(spec.control_drive(), spec.T); break;
        case ProtocolKind::AmplitudeOptimal: s = node_schedule(spec.control_drive(), spec.T); break;
        case ProtocolKind::RamseyUncontrolled:
        case ProtocolKind::Rabi: return s;
    }
    return spec.pulse_offset == 0.0 ? s : s.shifted(spec.pulse_offset, spec.T);
}

/// Ideal (noise-free) phase the protocol imprints.
inline double protocol_phase(const ProtocolSpec& spec) {
    if (spec.kind == ProtocolKind::Rabi) {
        const double a = spec.drive.amplitude;
        const double d = spec.drive.omega - spec.control_drive().omega;
        return spec.T * std::sqrt(a * a + d * d);
    }
    return accumulated_phase(spec.drive, schedule_for(spec), spec.T);
}

/// Analytic dφ/dω or dφ/dA with the control held fixed.
inline double protocol_slope(const ProtocolSpec& spec, SweepParameter p = SweepParameter::Omega) {
    if (spec.kind == ProtocolKind::Rabi) {
        const double a = spec.drive.amplitude;
        const double d = spec.drive.omega - spec.control_drive().omega;
        const double r = std::sqrt(a * a + d * d);
        return spec.T * (p == SweepParameter::Omega ? d : a) / r;
    }
    const PulseSchedule s = schedule_for(spec);
    return p == SweepParameter::Omega ? phase_slope_frequency(spec.drive, s, spec.T)
                                      : phase_slope_amplitude(spec.drive, s, spec.T);
}

inline double default_readout_phase(const ProtocolSpec& spec) { return protocol_phase(spec) - 0.5 * kPi; }

inline double rabi_probability(double amplitude, double detuning, double T) {
    const double a2 = amplitude * amplitude;
    const double r2 = a2 + detuning * detuning;
    if (r2 == 0.0) return 0.0;
    const double s = std::sin(0.5 * T * std::sqrt(r2));
    return std::clamp(a2 / r2 * s * s, 0.0, 1.0);
}

/// P_excited = ½[1 − C v(T) cos(φ − φ_ref)] for the Ramsey kinds; for Rabi
/// the flop probability is passed through the same contrast and envelope.
inline double excitation_probability(const ProtocolSpec& spec) {
    spec.validate();
    const double visibility = spec.noise.contrast * decoherence_envelope(spec.T, spec.noise, spec.shape);
    if (spec.kind == ProtocolKind::Rabi) {
        const double d = spec.drive.omega - spec.control_drive().omega;
        const double flop = rabi_probability(spec.drive.amplitude, d, spec.T);
        return std::clamp(0.5 * (1.0 - visibility) + visibility * flop, 0.0, 1.0);
    }
    const double phi = protocol_phase(spec);
    const double ref = spec.readout_phase.value_or(phi - 0.5 * kPi);
    return std::clamp(0.5 * (1.0 - visibility * std::cos(phi - ref)), 0.0, 1.0);
}

/// Closed-form QFI for a protocol: Fisher information about ω (A for the
/// amplitude kind), noise ignored.
inline QfiResult protocol_qfi(const ProtocolSpec& spec) {
    if (spec.kind == ProtocolKind::Rabi) {
        const double s = protocol_slope(spec);
        return {s * s, QfiMethod::ClosedForm};
    }
    if (spec.kind == ProtocolKind::AmplitudeOptimal) {
        const double s = protocol_slope(spec, SweepParameter::Amplitude);
        return {s * s, QfiMethod::Generator};
    }
    return qfi_generator(spec.drive, schedule_for(spec), spec.T);
}

struct SensitivityPoint {
    double T = 0.0;
    SweepParameter parameter = SweepParameter::Omega;
    double slope = 0.0;  // dφ/dω or dφ/dA from the fit
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    QfiResult qfi;             // slope²
    double sensitivity = 0.0;  // 1/|slope|
};

struct SlopeFitOptions {
    SimulationMode mode = SimulationMode::Sampled;
    std::uint64_t shots = 10000;  // per quadrature record
    std::uint64_t seed = 0;
    unsigned threads = 1;
    SweepParameter parameter = SweepParameter::Omega;
};

/// `points` values spanning center·(1 ± span_fraction).
inline std::vector<double> parameter_grid(double center, double span_fraction, std::size_t points = 101) {
    detail::require(points >= 3, ErrorCode::DegenerateInput, "grid needs at least 3 points");
    detail::require(span_fraction > 0.0, ErrorCode::InvalidArgument, "grid span must be > 0");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double u = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        g[i] = center * (1.0 + span_fraction * u);
    }
    return g;
}

/// Half-width of the sweep as a fraction of the working value.
///
/// Sampled frequency sweeps use ±0.2%, widened to ±2% when the phase
/// excursion over ±0.2% is below 0.05 rad. Amplitude sweeps use ±3.5%.
/// Noiseless sweeps use ±1e-5 so curvature does not bias the fitted slope.
inline double default_span_fraction(const ProtocolSpec& spec, SweepParameter p, SimulationMode mode) {
    if (mode == SimulationMode::Noiseless) return 1e-5;
    if (p == SweepParameter::Amplitude) return 0.035;
    const double excursion = std::abs(protocol_slope(spec, p)) * 0.002 * spec.drive.omega;
    return excursion < 0.05 ? 0.02 : 0.002;
}

namespace detail {

inline double nearest_branch(double value, double target) {
    return value + kTwoPi * std::round((target - value) / kTwoPi);
}

// Rabi phase from a flop probability: x = 2 asin √P, candidates ±x + 2πk.
inline double rabi_branch(double flop, double target) {
    const double x = 2.0 * std::asin(std::sqrt(std::clamp(flop, 0.0, 1.0)));
    const double a = nearest_branch(x, target);
    const double b = nearest_branch(-x, target);
    return std::abs(a - target) <= std::abs(b - target) ? a : b;
}

}  // namespace detail

/// Linear fit of the measured phase against the swept parameter.
///
/// Sampled mode draws `shots` per quadrature at every grid point from a
/// stream derived from (seed, point index), estimates the phase, unwraps it
/// outward from the grid center and regresses. Noiseless mode fits the exact
/// phases. The control schedule stays at the nominal drive throughout.
inline SensitivityPoint slope_fit_qfi(const ProtocolSpec& spec, std::span<const double> grid,
                                      const SlopeFitOptions& options) {
    spec.validate();
    if (grid.size() < 3) throw Error(ErrorCode::DegenerateInput, "slope fit needs at least 3 grid points");
    for (double g : grid) {
        detail::require(std::isfinite(g) && g > 0.0, ErrorCode::InvalidArgument, "grid values must be > 0");
    }

    const std::size_t n = grid.size();
    const std::size_t center = n / 2;
    const ProtocolSpec nominal = spec.with_parameter(options.parameter, grid[center]);
    const double ref = spec.readout_phase.value_or(default_readout_phase(nominal));
    const double visibility = spec.noise.contrast * decoherence_envelope(spec.T, spec.noise, spec.shape);

    std::vector<double> phases(n);
    std::vector<double> raw(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        const ProtocolSpec point = spec.with_parameter(options.parameter, grid[i]);
        if (options.mode == SimulationMode::Noiseless) {
            raw[i] = protocol_phase(point);
            return;
        }
        const std::uint64_t point_seed = derive_seed(options.seed, i);
        if (spec.kind == ProtocolKind::Rabi) {
            const MeasurementRecord rec = sample_outcomes(excitation_probability(point), 2 * options.shots,
                                                          derive_seed(point_seed, 0));
            const double a = point.drive.amplitude;
            const double d = point.drive.omega - point.control_drive().omega;
            const double prefactor = (a * a) / (a * a + d * d);
            const double flop = visibility > 0.0 ? (rec.fraction() - 0.5 * (1.0 - visibility)) / visibility : 0.5;
            raw[i] = flop / prefactor;  // unwrapped below
            return;
        }
        ProtocolSpec in_phase = point;
        in_phase.readout_phase = ref;
        ProtocolSpec quad = point;
        quad.readout_phase = ref + 0.5 * kPi;
        const MeasurementRecord r_in =
            sample_outcomes(excitation_probability(in_phase), options.shots, derive_seed(point_seed, 0));
        const MeasurementRecord r_q =
            sample_outcomes(excitation_probability(quad), options.shots, derive_seed(point_seed, 1));
        raw[i] = ref + estimate_phase(r_in, r_q).phase;
    });

    if (options.mode == SimulationMode::Noiseless) {
        phases = raw;
    } else {
        const bool rabi = spec.kind == ProtocolKind::Rabi;
        auto branch = [&](double value, double target) {
            return rabi ? detail::rabi_branch(value, target) : detail::nearest_branch(value, target);
        };
        phases[center] = branch(raw[center], protocol_phase(nominal));
        for (std::size_t i = center + 1; i < n; ++i) phases[i] = branch(raw[i], phases[i - 1]);
        for (std::size_t i = center; i-- > 0;) phases[i] = branch(raw[i], phases[i + 1]);
    }

    const RegressionResult fit = linear_regression(grid, phases);
    SensitivityPoint out;
    out.T = spec.T;
    out.parameter = options.parameter;
    out.slope = fit.slope;
    out.slope_stderr = fit.slope_stderr;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    out.qfi = {fit.slope * fit.slope, QfiMethod::SlopeFit};
    out.sensitivity = fit.slope != 0.0 ? 1.0 / std::abs(fit.slope) : std::numeric_limits<double>::infinity();
    return out;
}

/// slope_fit_qfi on the default grid (101 points, default span).
inline SensitivityPoint slope_fit_qfi(const ProtocolSpec& spec, const SlopeFitOptions& options,
                                      std::size_t points = 101) {
    const double center = options.parameter == SweepParameter::Omega ? spec.drive.omega : spec.drive.amplitude;
    const auto grid = parameter_grid(center, default_span_fraction(spec, options.parameter, options.mode), points);
    return slope_fit_qfi(spec, grid, options);
}

inline double rabi_qfi(double amplitude, double T) {
    detail::require(amplitude > 0.0 && T > 0.0, ErrorCode::InvalidArgument, "Rabi QFI needs A > 0 and T > 0");
    const double at = amplitude * T;
    return kPi * T * T * (kPi + 4.0 * at) / ((kPi + 2.0 * at) * (kPi + 2.0 * at));
}

/// Large-AT limit of rabi_qfi.
inline double rabi_qfi_asymptote(double amplitude, double T) { return kPi * T / amplitude; }

/// max over the signal phase θ of |dφ/dω| for free evolution:
/// A |∫₀ᵀ t e^{iωt} dt|. This is the envelope of the uncontrolled fringe.
inline double uncontrolled_envelope_slope(double amplitude, double omega, double T) {
    const Complex e = std::polar(1.0, omega * T);
    const Complex integral = T * e / (kI * omega) + (e - 1.0) / (omega * omega);
    return amplitude * std::abs(integral);
}

enum class LimitCurve {
    FrequencyUncontrolled,  // ω/(AT)
    FrequencyOptimal,       // π/(AT²)
    AmplitudeUncontrolled,  // ω/2: |dφ/dA| <= 2/ω without control
    AmplitudeOptimal,       // π/(2T): node pulses give dφ/dA = 2T/π
    Rabi,                   // 1/√I_Rabi
};

/// Phase-normalised sensitivity limit δg/δφ. Amplitude curves follow the
/// slope = ∫(μ₊ − μ₋) f dt convention; `amplitude_limit_half_convention`
/// gives the π/T and ω values quoted with the halved generator.
inline double sensitivity_limit(LimitCurve curve, double amplitude, double omega, double T) {
    detail::require(amplitude > 0.0 && omega > 0.0 && T > 0.0, ErrorCode::InvalidArgument,
                    "sensitivity limits need positive A, omega, T");
    switch (curve) {
        case LimitCurve::FrequencyUncontrolled: return omega / (amplitude * T);
        case LimitCurve::FrequencyOptimal: return kPi / (amplitude * T * T);
        case LimitCurve::AmplitudeUncontrolled: return 0.5 * omega;
        case LimitCurve::AmplitudeOptimal: return 0.5 * kPi / T;
        case LimitCurve::Rabi: return 1.0 / std::sqrt(rabi_qfi(amplitude, T));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown sensitivity limit kind");
}

inline double amplitude_limit_half_convention(LimitCurve curve, double omega, double T) {
    switch (curve) {
        case LimitCurve::AmplitudeUncontrolled: return omega;
        case LimitCurve::AmplitudeOptimal: return kPi / T;
        default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "not an amplitude limit curve");
}

}  // namespace qfilab
