#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rwcredit/cirpp.hpp"
#include "rwcredit/quadrature.hpp"
#include "rwcredit/sde_core.hpp"

using namespace rwcredit;

namespace {

const CirParams kBase{0.5138, 0.01497, 0.08904, 0.04348, 0.4};

// segment-wise trapezoid evaluation of the shift kernel, used as the
// independent oracle against the closed form
double kernel_by_trapezoid(const StepAlpha& alpha, double vartheta, double s, double t,
                           std::size_t panels_per_segment) {
    double total = 0.0;
    const std::size_t n = alpha.knot_times.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = std::max(alpha.knot_times[i], s);
        const double hi = (i + 1 < n) ? std::min(alpha.knot_times[i + 1], t) : t;
        if (hi <= lo) continue;
        total += vartheta * trapezoid(
                                [&](double u) {
                                    return alpha.values[i] * std::exp(-vartheta * (t - u));
                                },
                                lo, hi, panels_per_segment);
    }
    return total;
}

}  // namespace

TEST_CASE("closed-form square-root transform") {
    const LampertiForm form = cir_lamperti(kBase);
    CHECK(form.noise_scale == Catch::Approx(0.5 * kBase.sigma));

    const double cdrift = kBase.kappa * kBase.theta - 0.25 * kBase.sigma * kBase.sigma;
    for (double x : {0.05, 0.1, 0.2, 0.5, 1.0}) {
        const double expected = 0.5 * (cdrift / x - kBase.kappa * x);
        CHECK(form.transformed_drift(x) == Catch::Approx(expected).margin(1e-12));
    }
    for (double y : {1e-3, 0.01, 0.04348, 0.2, 1.0})
        CHECK(form.inverse_map(form.forward_map(y)) == Catch::Approx(y).margin(1e-10));
}

TEST_CASE("numeric transform with quadrature forward map") {
    Diffusion1D d;
    d.drift = [](double) { return 0.0; };
    d.diffusion = [](double y) { return 2.0 * std::sqrt(y); };
    d.domain_lower = 0.0;
    d.initial_value = 1.0;

    const LampertiForm form = lamperti_transform(d, 1.0);
    CHECK(form.noise_scale == 1.0);
    CHECK(form.forward_map(4.0) == Catch::Approx(1.0).margin(1e-8));
    for (double y : {0.5, 1.0, 2.0, 4.0, 9.0})
        CHECK(form.inverse_map(form.forward_map(y)) == Catch::Approx(y).margin(1e-10));
}

TEST_CASE("additive noise is its own transform") {
    Diffusion1D d;
    d.drift = [](double y) { return -y; };
    d.diffusion = [](double) { return 1.0; };
    d.initial_value = 0.0;

    const LampertiForm form = lamperti_transform(d, 0.0);
    CHECK(form.noise_scale == 1.0);
    for (double y : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        CHECK(form.forward_map(y) == Catch::Approx(y).margin(1e-10));
        CHECK(form.transformed_drift(y) == Catch::Approx(-y).margin(1e-8));
    }
}

TEST_CASE("non-positive diffusion is rejected") {
    Diffusion1D d;
    d.drift = [](double) { return 0.0; };
    d.diffusion = [](double y) { return y; };  // vanishes at the reference below
    d.initial_value = 1.0;
    CHECK_THROWS_AS(lamperti_transform(d, 0.0), NonPositiveDiffusion);
}

TEST_CASE("one-sided slope bound probe") {
    CHECK(check_one_sided_lipschitz([](double x) { return -x; }, 0.01, 10.0, 0.0, 64));

    const LampertiForm form = cir_lamperti(kBase);
    CHECK(check_one_sided_lipschitz(form.transformed_drift, 0.01, 5.0, 1.0, 128));
    CHECK(check_one_sided_lipschitz(form.transformed_drift, 0.01, 5.0, 0.0, 128));

    CHECK_FALSE(check_one_sided_lipschitz([](double x) { return x * x; }, 0.0, 10.0, 1.0, 64));
    CHECK_THROWS_AS(check_one_sided_lipschitz([](double x) { return x; }, 1.0, 1.0, 0.0, 8),
                    InvalidInterval);
}

TEST_CASE("boundary divergence probe") {
    SECTION("square-root factor with admissible parameters diverges") {
        const LampertiForm form = cir_lamperti(kBase);
        const std::vector<double> probes{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 3e-7};
        CHECK(feller_boundary_test(form, 0.5, probes));
    }
    SECTION("free Brownian motion stays below the threshold") {
        LampertiForm form;
        form.transformed_drift = [](double) { return 0.0; };
        form.noise_scale = 1.0;
        form.forward_map = [](double y) { return y; };
        form.inverse_map = [](double x) { return x; };
        form.drift_antiderivative = [](double) { return 0.0; };
        const std::vector<double> probes{-2, -4, -6, -8, -10};
        CHECK_FALSE(feller_boundary_test(form, 0.5, probes));
    }
    SECTION("volatility pushed past the positivity bound stays below the threshold") {
        CirParams violating = kBase;
        violating.sigma = 0.2;  // 2 kappa theta < sigma^2
        LampertiForm form;
        const double cdrift =
            violating.kappa * violating.theta - 0.25 * violating.sigma * violating.sigma;
        form.transformed_drift = [cdrift, k = violating.kappa](double x) {
            return 0.5 * (cdrift / x - k * x);
        };
        form.noise_scale = 0.5 * violating.sigma;
        form.forward_map = [](double y) { return std::sqrt(y); };
        form.inverse_map = [](double x) { return x * x; };
        form.range_lower = 0.0;
        form.drift_antiderivative = [cdrift, k = violating.kappa](double x) {
            return 0.5 * (cdrift * std::log(x) - 0.5 * k * x * x);
        };
        const std::vector<double> probes{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 3e-7};
        CHECK_FALSE(feller_boundary_test(form, 0.5, probes));
    }
}

TEST_CASE("additive-scale shift path") {
    TimeSeries path;
    for (int k = 0; k <= 20; ++k) {
        path.times.push_back(0.05 * k);
        path.values.push_back(0.1 + 0.01 * k);
    }

    SECTION("zero shift is the identity") {
        const auto spec = ShiftSpec::from_step(0.5 * kBase.kappa, 0.0,
                                               StepAlpha({0.0}, {0.0}));
        const TimeSeries out = rw_shift_path(path, spec);
        for (std::size_t i = 0; i < path.values.size(); ++i)
            CHECK(out.values[i] == path.values[i]);
    }
    SECTION("constant shift has the exponential-saturation closed form") {
        const double a = 0.03;
        const double vt = 0.5 * kBase.kappa;
        const auto spec = ShiftSpec::from_step(vt, 0.0, StepAlpha({0.0}, {a}));
        const TimeSeries out = rw_shift_path(path, spec);
        CHECK(out.values[0] == path.values[0]);  // zero at the start date
        for (std::size_t i = 0; i < path.times.size(); ++i) {
            const double expected = a * (1.0 - std::exp(-vt * path.times[i]));
            CHECK(out.values[i] - path.values[i] ==
                  Catch::Approx(expected).margin(1e-14));
        }
    }
    SECTION("two-step function matches the trapezoid oracle") {
        const StepAlpha alpha({0.0, 0.6}, {0.02, -0.01});
        const double vt = 0.5 * kBase.kappa;
        for (double t : {0.3, 0.6, 0.75, 1.0}) {
            const double closed = exp_kernel_shift(alpha, vt, 0.0, t);
            const double quad = kernel_by_trapezoid(alpha, vt, 0.0, t, 10000);
            CHECK(closed == Catch::Approx(quad).margin(1e-8));
        }
    }
    SECTION("kernel is linear in alpha") {
        const StepAlpha a1({0.0, 0.4, 0.7}, {0.02, -0.01, 0.005});
        const StepAlpha a2({0.0, 0.4, 0.7}, {-0.004, 0.03, 0.011});
        StepAlpha sum = a1;
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += a2.values[i];
        const double vt = 0.26;
        for (double t : {0.2, 0.5, 0.9}) {
            const double lhs = exp_kernel_shift(sum, vt, 0.0, t);
            const double rhs =
                exp_kernel_shift(a1, vt, 0.0, t) + exp_kernel_shift(a2, vt, 0.0, t);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }
    SECTION("kernel satisfies the semigroup split") {
        const StepAlpha alpha({0.0, 0.35, 0.8}, {0.015, -0.02, 0.04});
        const double vt = 0.31;
        const double t = 1.1;
        for (double m : {0.2, 0.35, 0.6, 0.95}) {
            const double whole = exp_kernel_shift(alpha, vt, 0.0, t);
            const double split = std::exp(-vt * (t - m)) * exp_kernel_shift(alpha, vt, 0.0, m) +
                                 exp_kernel_shift(alpha, vt, m, t);
            CHECK(whole == Catch::Approx(split).margin(1e-12));
        }
    }
    SECTION("functional alpha falls back to quadrature") {
        const double vt = 0.4;
        const auto spec = ShiftSpec::from_function(
            vt, 0.0, [](double u) { return 0.02 * std::sin(3.0 * u) + 0.01; }, 1.0);
        const double direct =
            vt * trapezoid(
                     [&](double u) {
                         return (0.02 * std::sin(3.0 * u) + 0.01) * std::exp(-vt * (1.0 - u));
                     },
                     0.0, 1.0, 200000);
        CHECK(spec.shift_at(1.0) == Catch::Approx(direct).margin(1e-8));
        CHECK_THROWS_AS(spec.shift_at(2.0), GridMismatch);
    }
}

TEST_CASE("shift mapped through the state transform") {
    const LampertiForm form = cir_lamperti(kBase);
    const double vt = 0.5 * kBase.kappa;
    const double saturation = 1.0 - std::exp(-vt);  // f(1) for a unit step at 0

    TimeSeries path;
    path.times = {0.0, 1.0};
    path.values = {0.04, 0.04};

    SECTION("zero alpha is the identity") {
        const auto spec = ShiftSpec::from_step(vt, 0.0, StepAlpha({0.0}, {0.0}));
        const auto out = rw_shift_original_scale(path, form, spec);
        CHECK(out.violation_count == 0);
        CHECK(out.series.values[0] == path.values[0]);
        CHECK(out.series.values[1] == path.values[1]);
    }
    SECTION("positive shift lands on (sqrt(y) + f)^2") {
        const auto spec =
            ShiftSpec::from_step(vt, 0.0, StepAlpha({0.0}, {0.1 / saturation}));
        const auto out = rw_shift_original_scale(path, form, spec);
        CHECK(out.violation_count == 0);
        CHECK(out.series.values[1] == Catch::Approx(0.09).margin(1e-12));
    }
    SECTION("negative shift beyond the root is flagged and floored") {
        const auto spec =
            ShiftSpec::from_step(vt, 0.0, StepAlpha({0.0}, {-0.3 / saturation}));
        const auto out = rw_shift_original_scale(path, form, spec);
        CHECK(out.violation_count == 1);
        CHECK(out.violated[1] == 1);
        CHECK(out.series.values[1] < 1e-20);
        CHECK_THROWS_AS(rw_shift_original_scale(path, form, spec, DomainPolicy::strict),
                        DomainViolation);
    }
}
