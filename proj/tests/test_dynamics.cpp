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

#include "oracles.hpp"
#include "qfilab/dynamics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qfilab;

namespace {

const double kA = kTwoPi * 0.6;

DriveParams drive(double A = kA, double w = kTwoPi, double th = 0.0) { return DriveParams::make(A, w, th); }

void expect_centers(const PulseSchedule& s, std::vector<double> want) {
    ASSERT_EQ(s.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(s.centers[i], want[i], 1e-12) << "pulse " << i;
}

}  // namespace

TEST(DriveParams, NormalizesThetaAndValidates) {
    EXPECT_NEAR(drive(1.0, 1.0, -0.5 * kPi).theta, 1.5 * kPi, 1e-15);
    EXPECT_NEAR(drive(1.0, 1.0, 5.0 * kPi).theta, kPi, 1e-12);
    EXPECT_THROW(DriveParams::make(-1.0, 1.0), Error);
    EXPECT_THROW(DriveParams::make(1.0, 0.0), Error);
    EXPECT_NO_THROW(DriveParams::make(0.0, 1.0));
}

TEST(AntinodeSchedule, OnePeriod) { expect_centers(antinode_schedule(drive(), 1.0), {0.25, 0.75}); }

TEST(AntinodeSchedule, ShorterThanFirstAntinodeIsEmpty) { EXPECT_TRUE(antinode_schedule(drive(), 0.2).empty()); }

TEST(AntinodeSchedule, QuarterPhaseShiftIncludesEndPulse) {
    const auto s = antinode_schedule(drive(kA, kTwoPi, 0.5 * kPi), 1.0);
    expect_centers(s, {0.5, 1.0});
    EXPECT_EQ(s.pulses_at_end(1.0), 1u);
    EXPECT_EQ(s.axis, PulseAxis::Y);
    EXPECT_TRUE(s.instantaneous_pulses());
}

TEST(NodeSchedule, Examples) {
    expect_centers(node_schedule(drive(), 1.0), {0.5});
    expect_centers(node_schedule(drive(), 2.0), {0.5, 1.0, 1.5});
    expect_centers(node_schedule(drive(kA, kPi), 3.0), {1.0, 2.0});
}

TEST(PulseSchedule, ValidationErrors) {
    EXPECT_THROW(PulseSchedule::instantaneous({0.5, 0.4}).validate(1.0), Error);
    try {
        PulseSchedule::instantaneous({0.5, 1.5}).validate(1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScheduleOutOfRange);
    }
    try {
        PulseSchedule::instantaneous({0.5, 0.505}).with_finite_pulses(0.01).validate(1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OverlappingPulses);
    }
    auto bad_area = PulseSchedule::instantaneous({0.5}).with_finite_pulses(0.01);
    bad_area.rabi_amplitude *= 1.001;
    EXPECT_THROW(bad_area.validate(1.0), Error);
    EXPECT_NO_THROW(PulseSchedule::instantaneous({0.5}).with_finite_pulses(0.01).validate(1.0));
}

TEST(SignFunction, FlipsOncePerPulse) {
    const auto s = antinode_schedule(drive(), 3.0);
    const SignFunction f(s);
    EXPECT_EQ(f(0.0), 1);
    EXPECT_EQ(f.flips(), s.size());
    int changes = 0;
    int prev = f(0.0);
    for (int i = 1; i <= 30000; ++i) {
        const int v = f(3.0 * i / 30000.0);
        changes += v != prev;
        prev = v;
    }
    EXPECT_EQ(changes, static_cast<int>(s.size()));
    EXPECT_EQ(f(3.0), s.size() % 2 == 0 ? 1 : -1);
}

TEST(AccumulatedPhase, UncontrolledHalfPeriod) {
    EXPECT_NEAR(accumulated_phase(drive(), {}, 0.5), 1.2, 1e-12);
    EXPECT_NEAR(oracle::phase(kA, kTwoPi, 0.0, {}, 0.5), 1.2, 1e-10);
}

TEST(AccumulatedPhase, FullPeriodVanishes) {
    EXPECT_NEAR(accumulated_phase(drive(3.3), {}, 1.0), 0.0, 1e-12);
    EXPECT_NEAR(accumulated_phase(drive(), antinode_schedule(drive(), 1.0), 1.0), 0.0, 1e-12);
}

TEST(AccumulatedPhase, RejectsPulsesBeyondT) {
    EXPECT_THROW(accumulated_phase(drive(), PulseSchedule::instantaneous({0.5, 1.2}), 1.0), Error);
}

TEST(PhaseSlopeFrequency, AntinodeOnePeriod) {
    const auto s = antinode_schedule(drive(), 1.0);
    EXPECT_NEAR(phase_slope_frequency(drive(), s, 1.0), 1.2, 1e-12);
    EXPECT_NEAR(oracle::slope_omega(kA, kTwoPi, 0.0, s.centers, 1.0), 1.2, 1e-9);
}

TEST(PhaseSlopeFrequency, UncontrolledExamples) {
    EXPECT_NEAR(phase_slope_frequency(drive(2.0), {}, 1.0), 0.0, 1e-13);
    // ωT = π/2: A[T/ω − 1/ω²].
    const double want = 0.25 / kTwoPi - 1.0 / (kTwoPi * kTwoPi);
    EXPECT_NEAR(want, 0.014458, 1e-6);
    EXPECT_NEAR(phase_slope_frequency(drive(1.0), {}, 0.25), want, 1e-14);
    EXPECT_NEAR(oracle::slope_omega(1.0, kTwoPi, 0.0, {}, 0.25), want, 1e-11);
}

TEST(PhaseSlopeFrequency, IntegerPeriodsGiveQuadraticLaw) {
    for (int m = 1; m <= 10; ++m) {
        const double T = m;
        const double s = phase_slope_frequency(drive(), antinode_schedule(drive(), T), T);
        const double want = kA * T * T / kPi;
        EXPECT_LT(std::abs(s / want - 1.0), 1e-10) << "m=" << m;
    }
}

TEST(PhaseSlopeAmplitude, Examples) {
    EXPECT_NEAR(phase_slope_amplitude(drive(), node_schedule(drive(), 1.0), 1.0), 2.0 / kPi, 1e-13);
    EXPECT_NEAR(oracle::slope_amplitude(kTwoPi, 0.0, {0.5}, 1.0), 2.0 / kPi, 1e-10);
    EXPECT_NEAR(phase_slope_amplitude(drive(), {}, 1.0), 0.0, 1e-13);
    EXPECT_NEAR(phase_slope_amplitude(drive(), {}, 0.5), 1.0 / kPi, 1e-13);
}

TEST(ClosedForms, MatchQuadratureOracleOnRandomInputs) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uA(0.0, 10.0), uw(0.5, 15.0), uth(0.0, kTwoPi), uT(0.05, 4.0);
    for (int trial = 0; trial < 60; ++trial) {
        const DriveParams d = drive(uA(rng), uw(rng), uth(rng));
        const double T = uT(rng);
        std::uniform_real_distribution<double> uc(0.0, T);
        std::vector<double> c(static_cast<std::size_t>(trial % 6));
        for (auto& x : c) x = uc(rng);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        const auto s = PulseSchedule::instantaneous(c);
        EXPECT_NEAR(accumulated_phase(d, s, T), oracle::phase(d.amplitude, d.omega, d.theta, c, T), 1e-8);
        const double slope = phase_slope_frequency(d, s, T);
        EXPECT_NEAR(slope, oracle::slope_omega(d.amplitude, d.omega, d.theta, c, T), 1e-8 * std::max(1.0, std::abs(slope)));
    }
}

TEST(PhaseSlopeFrequency, UncontrolledMatchesFiniteDifference) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uw(1.0, 10.0), uth(0.0, kTwoPi), uT(0.3, 5.0);
    for (int trial = 0; trial < 40; ++trial) {
        const DriveParams d = drive(kA, uw(rng), uth(rng));
        const double T = uT(rng);
        const double h = 1e-6 * d.omega;
        const double fd = (accumulated_phase(d.with_omega(d.omega + h), {}, T) -
                           accumulated_phase(d.with_omega(d.omega - h), {}, T)) /
                          (2.0 * h);
        const double s = phase_slope_frequency(d, {}, T);
        // Analytic derivative of (A/ω)(cos θ − cos(ωT+θ)) with respect to ω.
        const double w = d.omega, th = d.theta;
        const double analytic =
            kA * (T * std::sin(w * T + th) / w - (std::cos(th) - std::cos(w * T + th)) / (w * w));
        EXPECT_NEAR(s, analytic, 1e-12 * std::max(1.0, std::abs(s)));
        if (std::abs(s) > 1e-3) {
            EXPECT_LT(std::abs(fd / s - 1.0), 1e-5);
        }
    }
}

TEST(PropagateUnitary, EmptyScheduleIsDiagonalPhase) {
    const DriveParams d = drive(kA, kTwoPi, 0.3);
    const Unitary2 u = propagate_unitary(d, {}, 0.7, 0.01);
    EXPECT_LT(std::abs(u.matrix()(0, 1)), 1e-15);
    EXPECT_LT(std::abs(u.matrix()(1, 0)), 1e-15);
    const PureState out = u.apply(PureState::plus());
    EXPECT_NEAR(out.relative_phase(), accumulated_phase(d, {}, 0.7), 1e-12);
}

TEST(PropagateUnitary, InstantaneousPulsesReproduceTogglingPhase) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uth(0.0, kTwoPi), uT(0.3, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const DriveParams d = drive(kA * 0.5, kTwoPi, uth(rng));
        const double T = uT(rng);
        const auto s = antinode_schedule(d, T);
        const PureState tog = toggling_frame_state(propagate_unitary(d, s, T, T), s);
        const double phi = accumulated_phase(d, s, T);
        EXPECT_NEAR(std::remainder(tog.relative_phase() - phi, kTwoPi), 0.0, 1e-8);
        // The RK4 oracle gives the lab-frame state; compare overlaps.
        const auto ref = oracle::schrodinger(d.amplitude, d.omega, d.theta, s.centers, 0.0, 0.0, T, 1e-4);
        const PureState lab = propagate_unitary(d, s, T, T).apply(PureState::plus());
        const std::complex<double> ov = std::conj(ref[0]) * lab.amp0 + std::conj(ref[1]) * lab.amp1;
        EXPECT_NEAR(std::abs(ov), 1.0, 1e-9);
    }
}

TEST(PropagateUnitary, SteppedFreeEvolutionAgreesWithExact) {
    const DriveParams d = drive(kA, kTwoPi, 0.4);
    const auto s = antinode_schedule(d, 2.0);
    const Mat2 a = propagate_unitary(d, s, 2.0, 1e-3, FreeEvolution::Exact).matrix();
    const Mat2 b = propagate_unitary(d, s, 2.0, 1e-3, FreeEvolution::Stepped).matrix();
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(PropagateUnitary, FinitePulsesStayCloseToIdeal) {
    const DriveParams d = drive();
    const auto ideal = antinode_schedule(d, 1.0);
    const auto finite = ideal.with_finite_pulses(0.01);
    EXPECT_NEAR(finite.rabi_amplitude, 100.0 * kPi, 1e-9);
    const PureState a = propagate_unitary(d, ideal, 1.0, 1.0).apply(PureState::plus());
    const PureState b = propagate_unitary(d, finite, 1.0, 1e-4).apply(PureState::plus());
    EXPECT_GT(std::norm(inner(a, b)), 0.99);
    // Finite-pulse propagation agrees with the RK4 oracle.
    const auto ref = oracle::schrodinger(d.amplitude, d.omega, d.theta, finite.centers, 0.01, finite.rabi_amplitude,
                                         1.0, 1e-5);
    const std::complex<double> ov = std::conj(ref[0]) * b.amp0 + std::conj(ref[1]) * b.amp1;
    EXPECT_NEAR(std::abs(ov), 1.0, 1e-6);
}

TEST(PropagateUnitary, StepErrors) {
    const auto finite = PulseSchedule::instantaneous({0.5}).with_finite_pulses(0.01);
    EXPECT_THROW(propagate_unitary(drive(), {}, 1.0, 0.0), Error);
    EXPECT_THROW(propagate_unitary(drive(), {}, 1.0, -1.0), Error);
    try {
        propagate_unitary(drive(), finite, 1.0, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
    }
    const auto overlapping = PulseSchedule{{0.5, 0.505}, PulseAxis::Y, 0.01, 100.0 * kPi};
    try {
        propagate_unitary(drive(), overlapping, 1.0, 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OverlappingPulses);
    }
}

TEST(PropagateUnitary, UnitaryOnRandomInputs) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uA(0.0, 20.0), uw(0.5, 20.0), uth(0.0, kTwoPi), uT(0.05, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const DriveParams d = drive(uA(rng), uw(rng), uth(rng));
        const double T = uT(rng);
        auto s = antinode_schedule(d, T);
        const bool finite = trial % 2 == 0 && !s.empty();
        if (finite) {
            s = s.with_finite_pulses(1e-3);
            // Spacing is π/ω >= 0.15 us, so 1 ns pulses never overlap.
        }
        const Unitary2 u = propagate_unitary(d, s, T, finite ? 1e-4 : 0.01, trial % 3 == 0 ? FreeEvolution::Stepped
                                                                                      : FreeEvolution::Exact);
        const Mat2 g = u.matrix().adjoint() * u.matrix() - Mat2::Identity();
        EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(PulseAxis, XAndYGiveSameTogglingPhase) {
    const DriveParams d = drive(kA, kTwoPi, 0.2);
    auto s = antinode_schedule(d, 2.3);
    const double y = toggling_frame_state(propagate_unitary(d, s, 2.3, 2.3), s).relative_phase();
    s.axis = PulseAxis::X;
    const double x = toggling_frame_state(propagate_unitary(d, s, 2.3, 2.3), s).relative_phase();
    EXPECT_NEAR(std::remainder(x - y, kTwoPi), 0.0, 1e-12);
}

TEST(PulseSchedule, EndPulseDoesNotChangeIntegrals) {
    const DriveParams d = drive();
    const auto with_end = PulseSchedule::instantaneous({0.25, 0.75, 1.0});
    const auto without = PulseSchedule::instantaneous({0.25, 0.75});
    EXPECT_EQ(accumulated_phase(d, with_end, 1.0), accumulated_phase(d, without, 1.0));
    EXPECT_EQ(phase_slope_frequency(d, with_end, 1.0), phase_slope_frequency(d, without, 1.0));
}
