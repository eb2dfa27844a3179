#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "rwcredit/errors.hpp"

namespace rwcredit {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_depth = 55;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes on [-1,1] and weights (QUADPACK constants).
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - h * gk_nodes[i]);
        fv[14 - i] = f(mid + h * gk_nodes[i]);
    }
    fv[7] = f(mid);
    double kronrod = gk_wk[7] * fv[7];
    double gauss = gk_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kronrod += gk_wk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += gk_wg[i / 2] * (fv[i] + fv[14 - i]);
    }
    kronrod *= h;
    gauss *= h;
    return {kronrod, std::fabs(kronrod - gauss)};
}

template <class F>
double adaptive(const F& f, double a, double b, double tol, int depth,
                const QuadratureOptions& opt) {
    auto [value, err] = gk15(f, a, b);
    if (!std::isfinite(value))
        throw QuadratureFailure("non-finite integrand encountered");
    if (err <= tol || err <= opt.rel_tol * std::fabs(value)) return value;
    if (depth >= opt.max_depth)
        throw QuadratureFailure("adaptive quadrature failed to converge");
    const double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * tol, depth + 1, opt) +
           adaptive(f, mid, b, 0.5 * tol, depth + 1, opt);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a,b]; signed if a > b.
template <class F>
double integrate(const F& f, double a, double b, QuadratureOptions opt = {}) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, opt);
    return detail::adaptive(f, a, b, opt.abs_tol, 0, opt);
}

/// Composite trapezoid rule with n uniform subintervals; signed if a > b.
template <class F>
double trapezoid(const F& f, double a, double b, std::size_t n) {
    if (a == b || n == 0) return 0.0;
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) sum += f(a + h * static_cast<double>(i));
    return sum * h;
}

}  // namespace rwcredit
