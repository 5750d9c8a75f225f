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

#include "qfilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace qfilab {

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
};

/// Straight-line least squares.
///
/// Without `y_err` this is ordinary least squares and the slope error comes
/// from the residual scatter. With `y_err` each point gets weight 1/σ²
/// (infinite σ drops the point) and the slope error is the one implied by the
/// stated σ.
inline RegressionResult linear_regression(std::span<const double> x, std::span<const double> y,
                                          std::optional<std::span<const double>> y_err = std::nullopt) {
    if (x.size() != y.size() || (y_err && y_err->size() != x.size())) {
        throw Error(ErrorCode::InvalidArgument, "regression inputs differ in length");
    }
    const std::size_t n = x.size();

    auto weight = [&](std::size_t i) -> double {
        if (!y_err) return 1.0;
        const double s = (*y_err)[i];
        if (std::isinf(s)) return 0.0;
        if (!(s > 0.0)) throw Error(ErrorCode::DegenerateInput, "y errors must be > 0");
        return 1.0 / (s * s);
    };

    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight(i);
        if (w == 0.0) continue;
        ++used;
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    if (used < 3) throw Error(ErrorCode::DegenerateInput, "regression needs at least 3 points");
    const double mx = sx / sw;
    const double my = sy / sw;

    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight(i);
        if (w == 0.0) continue;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateInput, "regression x values are all equal");

    RegressionResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight(i);
        if (w == 0.0) continue;
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        ssr += w * e * e;
    }
    r.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    if (y_err) {
        r.slope_stderr = std::sqrt(1.0 / sxx);
    } else {
        r.slope_stderr = std::sqrt(std::max(0.0, ssr / static_cast<double>(used - 2)) / sxx);
    }
    return r;
}

}  // namespace qfilab
