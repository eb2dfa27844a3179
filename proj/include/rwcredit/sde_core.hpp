#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "rwcredit/errors.hpp"
#include "rwcredit/quadrature.hpp"
#include "rwcredit/step_alpha.hpp"

namespace rwcredit {

using RealFn = std::function<double(double)>;

/// Scalar diffusion dY = b(Y) dt + sigma(Y) dW on the interval
/// (domain_lower, +inf). sigma must stay positive on the interior;
/// sigma_prime is optional and falls back to central differences.
struct Diffusion1D {
    RealFn drift;
    RealFn diffusion;
    double domain_lower = -std::numeric_limits<double>::infinity();
    double initial_value = 0.0;
    RealFn diffusion_derivative;  // optional analytic sigma'

    void validate() const {
        if (!drift || !diffusion)
            throw ValidationError("diffusion needs drift and diffusion coefficients");
        if (!(initial_value > domain_lower))
            throw ValidationError("initial value must lie inside the state domain");
    }
};

/// Additive-noise form dX = L(X) dt + zeta dW obtained from a state
/// transform X = phi(Y). range_lower is the infimum of phi over the state
/// domain (-inf when phi is unbounded below).
struct LampertiForm {
    RealFn transformed_drift;
    double noise_scale = 1.0;
    RealFn forward_map;
    RealFn inverse_map;
    double reference_point = 0.0;
    double range_lower = -std::numeric_limits<double>::infinity();
    RealFn drift_antiderivative;  // optional closed-form of int L
};

/// Caller-supplied closed-form transform, used verbatim when available.
struct ClosedFormTransform {
    RealFn phi;
    RealFn phi_inverse;
    double noise_scale = 1.0;
    double range_lower = -std::numeric_limits<double>::infinity();
    RealFn drift_antiderivative;
};

/// Deterministic drift shift: mean-reversion weight vartheta and shift
/// function alpha, active from start_time onward.
struct ShiftSpec {
    double vartheta = 0.0;
    double start_time = 0.0;
    std::optional<StepAlpha> step;
    RealFn alpha_fn;           // used when step is absent
    double alpha_fn_end = 0.0; // span covered by alpha_fn

    static ShiftSpec from_step(double vartheta, double start_time, StepAlpha alpha) {
        ShiftSpec s;
        s.vartheta = vartheta;
        s.start_time = start_time;
        s.step = std::move(alpha);
        return s;
    }
    static ShiftSpec from_function(double vartheta, double start_time, RealFn alpha,
                                   double covered_until) {
        ShiftSpec s;
        s.vartheta = vartheta;
        s.start_time = start_time;
        s.alpha_fn = std::move(alpha);
        s.alpha_fn_end = covered_until;
        return s;
    }

    /// vartheta * int_s^t alpha(u) e^{-vartheta (t-u)} du
    double shift_at(double t) const {
        if (t <= start_time) return 0.0;
        if (step) return exp_kernel_shift(*step, vartheta, start_time, t);
        if (!alpha_fn) throw ValidationError("shift spec has no alpha representation");
        if (t > alpha_fn_end + 1e-12)
            throw GridMismatch("alpha function does not cover the requested time span");
        const double vt = vartheta;
        // 2^14 trapezoid panels keeps the kernel error far below test tolerances
        return vt * trapezoid(
                        [&](double u) { return alpha_fn(u) * std::exp(-vt * (t - u)); },
                        start_time, t, 1 << 14);
    }
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// Result of mapping a path through phi^{-1}(phi(y) + f) with the
/// floor-and-count domain policy.
struct ShiftedSeries {
    TimeSeries series;
    std::vector<char> violated;  // per time point
    std::size_t violation_count = 0;
};

enum class DomainPolicy { floor_and_count, strict };

namespace detail {

inline double sigma_prime_or_fd(const Diffusion1D& d, double x) {
    if (d.diffusion_derivative) return d.diffusion_derivative(x);
    const double h = std::max(1e-6, 1e-6 * std::fabs(x));
    return (d.diffusion(x + h) - d.diffusion(x - h)) / (2.0 * h);
}

inline void require_positive_sigma(const Diffusion1D& d, double x) {
    if (!(d.diffusion(x) > 0.0))
        throw NonPositiveDiffusion("diffusion coefficient not positive at x=" +
                                   std::to_string(x));
}

}  // namespace detail

/// Transform a scalar diffusion to additive-noise form using caller-supplied
/// closed-form maps; no quadrature runs.
inline LampertiForm lamperti_transform(const Diffusion1D& diffusion,
                                       double reference_point,
                                       const ClosedFormTransform& closed) {
    diffusion.validate();
    if (!closed.phi || !closed.phi_inverse)
        throw ValidationError("closed-form transform needs phi and its inverse");
    LampertiForm form;
    form.noise_scale = closed.noise_scale;
    form.forward_map = closed.phi;
    form.inverse_map = closed.phi_inverse;
    form.reference_point = reference_point;
    form.range_lower = closed.range_lower;
    form.drift_antiderivative = closed.drift_antiderivative;
    const double zeta = closed.noise_scale;
    form.transformed_drift = [diffusion, inv = closed.phi_inverse, zeta](double x) {
        const double y = inv(x);
        detail::require_positive_sigma(diffusion, y);
        const double s = diffusion.diffusion(y);
        return zeta * (diffusion.drift(y) / s - 0.5 * detail::sigma_prime_or_fd(diffusion, y));
    };
    return form;
}

/// Transform with numerically constructed phi(y) = int_ref^y dx / sigma(x)
/// (unit noise scale). The inverse is solved by safeguarded Newton on the
/// strictly increasing forward map.
inline LampertiForm lamperti_transform(const Diffusion1D& diffusion,
                                       double reference_point) {
    diffusion.validate();
    if (!(reference_point > diffusion.domain_lower))
        throw ValidationError("reference point must lie inside the state domain");
    // probe positivity of sigma around the reference and initial points
    for (double x : {reference_point, diffusion.initial_value,
                     0.5 * (reference_point + diffusion.initial_value)})
        detail::require_positive_sigma(diffusion, x);

    auto sigma = diffusion.diffusion;
    auto phi = [sigma, reference_point](double y) {
        return integrate([&](double x) {
            if (!(sigma(x) > 0.0))
                throw NonPositiveDiffusion("diffusion coefficient not positive inside the transform integral");
            return 1.0 / sigma(x);
        }, reference_point, y);
    };
    const double lower = diffusion.domain_lower;
    auto phi_inverse = [phi, sigma, reference_point, lower](double target) {
        // bracket by geometric expansion from the reference point
        double lo = reference_point, hi = reference_point;
        double step = std::max(1.0, 1e-2 * std::fabs(reference_point));
        if (target >= 0.0) {
            while (phi(hi) < target) {
                hi += step;
                step *= 2.0;
                if (!std::isfinite(hi)) throw QuadratureFailure("inverse map bracket diverged");
            }
        } else {
            while (phi(lo) > target) {
                double next = lo - step;
                if (next <= lower) next = 0.5 * (lo + lower);
                lo = next;
                step *= 2.0;
                if (lo - lower < 1e-300) throw QuadratureFailure("inverse map bracket hit the domain boundary");
            }
        }
        double y = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double g = phi(y) - target;
            if (g > 0.0) hi = y; else lo = y;
            const double dg = 1.0 / sigma(y);
            double next = y - g / dg;  // Newton; phi' = 1/sigma
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::fabs(next - y) < 1e-14 * (1.0 + std::fabs(y))) return next;
            y = next;
        }
        return y;
    };

    LampertiForm form;
    form.noise_scale = 1.0;
    form.forward_map = phi;
    form.inverse_map = phi_inverse;
    form.reference_point = reference_point;
    form.transformed_drift = [diffusion, phi_inverse](double x) {
        const double y = phi_inverse(x);
        detail::require_positive_sigma(diffusion, y);
        const double s = diffusion.diffusion(y);
        return diffusion.drift(y) / s - 0.5 * detail::sigma_prime_or_fd(diffusion, y);
    };
    return form;
}

/// Sampled falsification check of the one-sided Lipschitz bound
/// L(x') - L(x) <= K (x' - x) over all ordered pairs on a uniform grid.
inline bool check_one_sided_lipschitz(const RealFn& L, double lo, double hi, double K,
                                      std::size_t grid_size) {
    if (!(lo < hi)) throw InvalidInterval("probe interval must satisfy lower < upper");
    if (grid_size < 2) throw InvalidInterval("grid needs at least two points");
    std::vector<double> xs(grid_size), ls(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i) {
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_size - 1);
        ls[i] = L(xs[i]);
    }
    for (std::size_t i = 0; i < grid_size; ++i)
        for (std::size_t j = i + 1; j < grid_size; ++j)
            if (ls[j] - ls[i] > K * (xs[j] - xs[i]) + 1e-12) return false;
    return true;
}

/// Boundary classification probe: evaluates
///   v(x) = int_d^x int_d^y exp(-(2/zeta^2) int_z^y L) dz dy
/// along probe points approaching the lower boundary and declares divergence
/// when v grows monotonically beyond the threshold.
inline bool feller_boundary_test(const LampertiForm& lamperti, double d,
                                 const std::vector<double>& probe_points,
                                 double divergence_threshold = 1e6) {
    if (probe_points.size() < 2)
        throw InvalidInterval("need at least two probe points");
    for (std::size_t i = 0; i + 1 < probe_points.size(); ++i)
        if (!(probe_points[i + 1] < probe_points[i]))
            throw InvalidInterval("probe points must strictly decrease toward the boundary");

    // 1e-10 absolute everywhere it matters; the relative cap keeps the
    // divergent branch (values beyond 1e6) tractable in double precision.
    QuadratureOptions opt{1e-10, 1e-6, 55};
    const double scale = 2.0 / (lamperti.noise_scale * lamperti.noise_scale);
    auto big_l = [&](double u) {
        if (lamperti.drift_antiderivative) return lamperti.drift_antiderivative(u);
        return integrate(lamperti.transformed_drift, lamperti.reference_point, u, opt);
    };

    auto v_at = [&](double x) {
        auto inner = [&](double y) {
            const double gy = big_l(y);
            return integrate(
                [&](double z) { return std::exp(scale * (big_l(z) - gy)); },
                d, y, opt);
        };
        return integrate(inner, d, x, opt);
    };

    double prev = -std::numeric_limits<double>::infinity();
    double last = 0.0;
    for (double x : probe_points) {
        last = v_at(x);
        if (!std::isfinite(last)) throw QuadratureFailure("boundary-test integral not finite");
        if (!(last > prev)) return false;  // not strictly increasing toward the boundary
        prev = last;
    }
    return last > divergence_threshold;
}

/// Additive-scale shift: X*(t) = X(t) + vartheta int_s^t alpha e^{-vartheta(t-u)} du.
inline TimeSeries rw_shift_path(const TimeSeries& x_path, const ShiftSpec& shift) {
    if (x_path.times.size() != x_path.values.size() || x_path.times.empty())
        throw GridMismatch("path needs matching, non-empty times and values");
    if (std::fabs(x_path.times.front() - shift.start_time) > 1e-12)
        throw GridMismatch("path must start at the shift start time");
    for (std::size_t i = 0; i + 1 < x_path.times.size(); ++i)
        if (!(x_path.times[i] < x_path.times[i + 1]))
            throw GridMismatch("path time grid must be strictly increasing");

    TimeSeries out = x_path;
    for (std::size_t i = 0; i < out.times.size(); ++i)
        out.values[i] += shift.shift_at(out.times[i]);
    return out;
}

/// Shift mapped back through the state transform:
/// Y*(t) = phi^{-1}(phi(Y(t)) + f(t)), flagging any point where the shifted
/// argument leaves the range of phi (floored or rejected per policy).
inline ShiftedSeries rw_shift_original_scale(const TimeSeries& y_path,
                                             const LampertiForm& lamperti,
                                             const ShiftSpec& shift,
                                             DomainPolicy policy = DomainPolicy::floor_and_count) {
    if (y_path.times.size() != y_path.values.size() || y_path.times.empty())
        throw GridMismatch("path needs matching, non-empty times and values");
    ShiftedSeries out;
    out.series.times = y_path.times;
    out.series.values.resize(y_path.values.size());
    out.violated.assign(y_path.values.size(), 0);
    for (std::size_t i = 0; i < y_path.times.size(); ++i) {
        const double f = shift.shift_at(y_path.times[i]);
        if (f == 0.0) {  // keep the no-shift case exact
            out.series.values[i] = y_path.values[i];
            continue;
        }
        double arg = lamperti.forward_map(y_path.values[i]) + f;
        if (arg < lamperti.range_lower) {
            if (policy == DomainPolicy::strict)
                throw DomainViolation("shifted state left the transform range at t=" +
                                      std::to_string(y_path.times[i]));
            arg = lamperti.range_lower + 1e-12;
            out.violated[i] = 1;
            ++out.violation_count;
        }
        out.series.values[i] = lamperti.inverse_map(arg);
    }
    return out;
}

}  // namespace rwcredit
