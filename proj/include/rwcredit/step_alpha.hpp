#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rwcredit/errors.hpp"

namespace rwcredit {

/// Piecewise-constant drift-shift function alpha(t).
///
/// Value values[i] applies on [knot_times[i], knot_times[i+1]); the last
/// value holds for all later times and alpha is zero before the first knot.
struct StepAlpha {
    std::vector<double> knot_times;
    std::vector<double> values;

    StepAlpha() = default;
    StepAlpha(std::vector<double> knots, std::vector<double> vals)
        : knot_times(std::move(knots)), values(std::move(vals)) {
        validate();
    }

    void validate() const {
        if (knot_times.empty() || knot_times.size() != values.size())
            throw ValidationError("step function needs matching, non-empty knots and values");
        for (std::size_t i = 0; i + 1 < knot_times.size(); ++i)
            if (!(knot_times[i] < knot_times[i + 1]))
                throw ValidationError("step function knots must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v))
                throw ValidationError("step function values must be finite");
    }

    double value_at(double t) const {
        if (t < knot_times.front()) return 0.0;
        std::size_t i = knot_times.size() - 1;
        while (i > 0 && t < knot_times[i]) --i;
        return values[i];
    }
};

/// Exponential-kernel convolution
///   vartheta * integral_s^t alpha(u) exp(-vartheta (t-u)) du,
/// evaluated exactly, one closed-form term per step segment.
inline double exp_kernel_shift(const StepAlpha& alpha, double vartheta, double s,
                               double t) {
    if (t <= s || vartheta == 0.0) return 0.0;
    double total = 0.0;
    const std::size_t n = alpha.knot_times.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double seg_lo = std::max(alpha.knot_times[i], s);
        const double seg_hi =
            (i + 1 < n) ? std::min(alpha.knot_times[i + 1], t) : t;
        if (seg_hi <= seg_lo) continue;
        // vartheta * int_lo^hi a e^{-vartheta (t-u)} du
        //   = a [e^{-vartheta (t-hi)} - e^{-vartheta (t-lo)}]
        total += alpha.values[i] * (std::exp(-vartheta * (t - seg_hi)) -
                                    std::exp(-vartheta * (t - seg_lo)));
    }
    return total;
}

}  // namespace rwcredit
