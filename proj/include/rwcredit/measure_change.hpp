#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rwcredit/cirpp.hpp"
#include "rwcredit/errors.hpp"
#include "rwcredit/step_alpha.hpp"

namespace rwcredit {

/// Calibration targets: cumulative-hazard values c_i at dates t_i, all for
/// the tenor target_maturity. Spread-quoted targets are converted once on
/// construction.
struct TargetSet {
    double target_maturity = 0.0;  // years
    std::vector<double> dates;     // years, strictly increasing
    std::vector<double> values;    // cumulative-hazard targets

    void validate() const {
        if (dates.empty() || dates.size() != values.size())
            throw ValidationError("target set needs matching, non-empty dates and values");
        double prev = 0.0;
        for (std::size_t i = 0; i < dates.size(); ++i) {
            if (!(dates[i] > prev))
                throw ValidationError("target dates must be positive and strictly increasing");
            if (!(dates[i] < target_maturity))
                throw ValidationError("target dates must precede the target maturity");
            if (!(values[i] >= 0.0))
                throw ValidationError("hazard targets must be nonnegative");
            prev = dates[i];
        }
    }
};

/// Drift-shift path f on a time grid.
struct ShiftPath {
    std::vector<double> times;
    std::vector<double> f;
};

/// f(t) = (kappa/2) int_0^t alpha(u) e^{-kappa (t-u)/2} du, exact for step
/// functions (one closed-form term per segment).
inline double f_from_alpha(const StepAlpha& alpha, double kappa, double t) {
    if (t < 0.0) throw BadInterval("shift path needs t >= 0");
    return exp_kernel_shift(alpha, 0.5 * kappa, 0.0, t);
}

/// One-interval update of the shift path:
///   f_i = e^{-kappa dt/2} f_{i-1} + alpha_i (1 - e^{-kappa dt/2}).
inline double f_recursion_step(double f_prev, double alpha_i, double dt, double kappa) {
    if (!(dt > 0.0)) throw BadInterval("recursion step needs dt > 0");
    const double decay = std::exp(-0.5 * kappa * dt);
    return decay * f_prev + alpha_i * (1.0 - decay);
}

/// F(t, sqrt(y)) = f^2 + 2 f sqrt(y); the additive intensity shift.
inline double intensity_shift_term(double y_t, double f_t) {
    return f_t * f_t + 2.0 * f_t * std::sqrt(y_t);
}

/// lambda* = lambda + f^2 + 2 f sqrt(y). When sqrt(y) + f leaves the state
/// domain the shifted square root is floored per the domain policy and the
/// flag (if supplied) records the event.
inline double shift_intensity(double lambda_t, double y_t, double f_t,
                              DomainPolicy policy = DomainPolicy::floor_and_count,
                              bool* violated = nullptr) {
    if (!(y_t > 0.0)) throw DomainViolation("factor level must be positive");
    const double root = std::sqrt(y_t) + f_t;
    if (root < 0.0) {
        if (policy == DomainPolicy::strict)
            throw DomainViolation("shifted square-root state went negative");
        if (violated) *violated = true;
        const double floored = 1e-12;
        return lambda_t + floored * floored - y_t;
    }
    return lambda_t + intensity_shift_term(y_t, f_t);
}

/// Lambda* = Lambda + B(t,T) (f^2 + 2 f sqrt(y)); the linear hazard shift.
/// Never clamped: negative outputs are possible under extreme shifts and are
/// reported downstream as realism warnings.
inline double shift_hazard(double lambda_big, double b_tT, double y_t, double f_t) {
    if (!(b_tT >= 0.0)) throw BadInterval("bond slope must be nonnegative");
    if (!(y_t > 0.0)) throw DomainViolation("factor level must be positive");
    return lambda_big + b_tT * intensity_shift_term(y_t, f_t);
}

/// Spread shift in discount-factor space:
///   e^{-(T-t) Sp*} = delta (1 - e^{-B F}) + e^{-(B F + (T-t) Sp)},
/// algebraically identical to converting to hazard, shifting, converting back.
inline double shift_spread(double sp, double b_tT, double y_t, double f_t, double delta,
                           double t, double T) {
    if (!(t < T)) throw BadInterval("spread shift needs t < T");
    if (!(y_t > 0.0)) throw DomainViolation("factor level must be positive");
    const double bf = b_tT * intensity_shift_term(y_t, f_t);
    if (bf == 0.0) return sp;
    const double tau = T - t;
    const double discount = delta * (-std::expm1(-bf)) + std::exp(-(bf + tau * sp));
    if (!(discount > 0.0))
        throw NonPositiveDiscountFactor("shifted discount factor is not positive");
    return -std::log(discount) / tau;
}

/// Diagnostic value of the measure-change kernel at a state pair:
///   phi = -(1/sigma) [ (kappa theta -/+ sigma^2/4)(1/x* - 1/x) - kappa alpha ].
inline double girsanov_kernel(double x_t, double x_star_t, double alpha_t,
                              const CirParams& params,
                              GammaConvention conv = GammaConvention::minus_quarter_sigma2) {
    if (!(x_t > 1e-12 && x_star_t > 1e-12))
        throw DegenerateState("kernel evaluated too close to the state boundary");
    const double quarter = 0.25 * params.sigma * params.sigma;
    const double coeff = conv == GammaConvention::minus_quarter_sigma2
                             ? params.kappa * params.theta - quarter
                             : params.kappa * params.theta + quarter;
    return -(coeff * (1.0 / x_star_t - 1.0 / x_t) - params.kappa * alpha_t) / params.sigma;
}

/// Per-date ensemble statistics feeding the calibration.
struct RnDateStats {
    double e_lambda;    // mean Lambda(t_i, T~)
    double e_sqrt_y;    // mean sqrt(y(t_i))
    double se_lambda = 0.0;
    double se_sqrt_y = 0.0;
};

struct CalibrationResult {
    StepAlpha alpha;
    std::vector<double> f_at_knots;
    std::vector<double> gap_over_b;  // (c_i - E Lambda_i) / B_i
    std::vector<double> residuals;   // re-substitution error of the solved identity
};

/// Sequentially solve
///   f^2(t_i) + 2 f(t_i) E sqrt(y(t_i)) = (c_i - E Lambda(t_i,T~)) / B(t_i,T~)
/// for the step values of alpha, taking the root branch continuous through
/// f = 0, then invert the one-interval recursion for each alpha_i. The
/// returned alpha has its i-th value active on (t_{i-1}, t_i].
inline CalibrationResult calibrate_alpha(const TargetSet& targets,
                                         const std::vector<RnDateStats>& rn_stats,
                                         const std::vector<double>& b_lookup,
                                         double kappa, double grid_start = 0.0) {
    targets.validate();
    const std::size_t n = targets.dates.size();
    if (rn_stats.size() != n || b_lookup.size() != n)
        throw GridMismatch("calibration needs one statistic and one bond slope per target date");

    CalibrationResult out;
    out.alpha.knot_times.resize(n);
    out.alpha.values.resize(n);
    out.f_at_knots.resize(n);
    out.gap_over_b.resize(n);
    out.residuals.resize(n);

    double f_prev = 0.0;
    double t_prev = grid_start;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rn_stats[i].e_sqrt_y > 0.0))
            throw ValidationError("calibration needs positive mean square-root levels");
        if (!(b_lookup[i] > 0.0))
            throw ValidationError("calibration needs positive bond slopes");
        const double m = rn_stats[i].e_sqrt_y;
        const double g = (targets.values[i] - rn_stats[i].e_lambda) / b_lookup[i];
        const double disc = m * m + g;
        if (disc < 0.0) {
            const double min_c = rn_stats[i].e_lambda - b_lookup[i] * m * m;
            throw InfeasibleTarget(
                i, min_c,
                "target " + std::to_string(targets.values[i]) + " at date " +
                    std::to_string(targets.dates[i]) +
                    " below the attainable minimum " + std::to_string(min_c));
        }
        // exact zero at g = 0 keeps the no-shift case bit-identical downstream
        const double f_i = g == 0.0 ? 0.0 : -m + std::sqrt(disc);
        const double dt = targets.dates[i] - t_prev;
        const double decay = std::exp(-0.5 * kappa * dt);
        out.alpha.knot_times[i] = t_prev;
        out.alpha.values[i] = (f_i - decay * f_prev) / (1.0 - decay);
        out.f_at_knots[i] = f_i;
        out.gap_over_b[i] = g;
        out.residuals[i] = (f_i * f_i + 2.0 * f_i * m) - g;
        f_prev = f_i;
        t_prev = targets.dates[i];
    }
    return out;
}

}  // namespace rwcredit
