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

// Compares free evolution with antinode-pulse control for a 600 kHz
// amplitude, 1 MHz signal and prints QFI against duration.

#include "qfilab.hpp"

#include <cstdio>

int main() {
    using namespace qfilab;
    const DriveParams drive = DriveParams::make(kTwoPi * 0.6, kTwoPi, 0.0);

    // The uncontrolled column is the best case over signal phase, (A T / ω)².
    std::printf("%8s %14s %14s %14s\n", "T [us]", "uncontrolled", "controlled", "A^2T^4/pi^2");
    for (int periods = 1; periods <= 10; ++periods) {
        ProtocolSpec spec;
        spec.drive = drive;
        spec.T = periods * drive.period();
        const double envelope = uncontrolled_envelope_slope(drive.amplitude, drive.omega, spec.T);
        const double free = envelope * envelope;
        spec.kind = ProtocolKind::FrequencyOptimal;
        const double controlled = protocol_qfi(spec).value;
        const double a = drive.amplitude;
        std::printf("%8.3f %14.6g %14.6g %14.6g\n", spec.T, free, controlled,
                    a * a * spec.T * spec.T * spec.T * spec.T / (kPi * kPi));
    }

    // A sampled slope fit at T = 2 us with transmon noise.
    ProtocolSpec spec;
    spec.drive = drive;
    spec.T = 2.0;
    spec.noise = NoiseParams::transmon();
    SlopeFitOptions fit;
    fit.seed = 42;
    const SensitivityPoint p = slope_fit_qfi(spec, fit);
    std::printf("sampled slope at T=2 us: %.4f +- %.4f rad per rad/us\n", p.slope, p.slope_stderr);
    return 0;
}
