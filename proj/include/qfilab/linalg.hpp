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

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace qfilab {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr Complex kI{0.0, 1.0};

namespace pauli {

inline Mat2 x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat2 y() {
    Mat2 m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

inline Mat2 z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

}  // namespace pauli

/// exp(-i dt (hx σx + hy σy + hz σz) / 2), evaluated in closed form.
inline Mat2 su2_exp(double hx, double hy, double hz, double dt) {
    const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
    const double angle = 0.5 * norm * dt;
    Mat2 out = Mat2::Identity() * std::cos(angle);
    if (norm > 0.0) {
        const double s = std::sin(angle) / norm;
        out += -kI * s * (hx * pauli::x() + hy * pauli::y() + hz * pauli::z());
    }
    return out;
}

/// Diagonal propagator of a σz Hamiltonian that accumulated `phase`
/// (relative phase of |1⟩ against |0⟩).
inline Mat2 z_phase(double phase) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::polar(1.0, -0.5 * phase);
    m(1, 1) = std::polar(1.0, 0.5 * phase);
    return m;
}

}  // namespace qfilab
