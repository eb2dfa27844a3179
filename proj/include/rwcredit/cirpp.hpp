#pragma once

#include <cmath>
#include <string>

#include "rwcredit/errors.hpp"
#include "rwcredit/sde_core.hpp"
#include "rwcredit/special_functions.hpp"

namespace rwcredit {

/// Square-root intensity-factor parameters plus the recovery rate used by
/// the spread/hazard conversions.
struct CirParams {
    double kappa;           // mean-reversion speed, 1/years
    double theta;           // long-run level, 1/years
    double sigma;           // volatility of sqrt(y)
    double y0;              // initial factor level, 1/years
    double recovery_delta;  // recovery rate in [0,1)

    void validate() const {
        if (!(kappa > 0.0 && theta > 0.0 && sigma > 0.0 && y0 > 0.0))
            throw ValidationError("kappa, theta, sigma and y0 must be positive");
        if (!(2.0 * kappa * theta >= sigma * sigma))
            throw ValidationError("factor parameters violate 2*kappa*theta >= sigma^2");
        if (!(recovery_delta >= 0.0 && recovery_delta < 1.0))
            throw ValidationError("recovery rate must lie in [0,1)");
    }

    double h() const { return std::sqrt(kappa * kappa + 2.0 * sigma * sigma); }
};

struct BondFactors {
    double a_factor;  // A(t,T)
    double b_factor;  // B(t,T), years
    double h;         // sqrt(kappa^2 + 2 sigma^2)
};

namespace detail {

// 2h + (kappa+h)(e^{h tau} - 1) rewritten as e^{h tau} * cir_g(tau); the
// factor below stays in [2h, kappa+h] so every formula using it is
// overflow-free at any tenor.
inline double cir_g_scaled(const CirParams& p, double tau) {
    const double h = p.h();
    return p.kappa + h + (h - p.kappa) * std::exp(-h * tau);
}

}  // namespace detail

inline double log_bond_a(const CirParams& p, double tau) {
    if (tau == 0.0) return 0.0;
    const double h = p.h();
    const double exponent = 2.0 * p.kappa * p.theta / (p.sigma * p.sigma);
    return exponent * (std::log(2.0 * h) + 0.5 * (p.kappa - h) * tau -
                       std::log(detail::cir_g_scaled(p, tau)));
}

inline double bond_b(const CirParams& p, double tau) {
    const double h = p.h();
    return 2.0 * (-std::expm1(-h * tau)) / detail::cir_g_scaled(p, tau);
}

/// Closed-form A(t,T), B(t,T); both depend on (t,T) only through T - t.
inline BondFactors bond_factors(const CirParams& params, double t, double T) {
    params.validate();
    if (t > T) throw BadInterval("bond factors need t <= T");
    const double tau = T - t;
    return {std::exp(log_bond_a(params, tau)), bond_b(params, tau), params.h()};
}

/// D(t) = d/dt ln A(0,t) and E(t) = d/dt B(0,t) in closed form.
inline std::pair<double, double> d_e_functions(const CirParams& params, double t) {
    params.validate();
    if (t < 0.0) throw BadInterval("D and E need t >= 0");
    const double h = params.h();
    const double g = detail::cir_g_scaled(params, t);
    const double exponent = 2.0 * params.kappa * params.theta / (params.sigma * params.sigma);
    const double d_val = exponent * (params.kappa + h) * (0.5 - h / g);
    const double e_val = 4.0 * h * h * std::exp(-h * t) / (g * g);
    return {d_val, e_val};
}

/// Spread over [t,T] implied by a cumulative hazard:
///   Sp = -(1/(T-t)) ln[delta + (1-delta) e^{-Lambda}].
inline double spread_from_hazard(double lambda_star, double delta, double t, double T) {
    if (!(t < T)) throw BadInterval("spread needs t < T");
    return -std::log(delta + (1.0 - delta) * std::exp(-lambda_star)) / (T - t);
}

/// Inverse of spread_from_hazard; requires sp < -ln(delta)/(T-t).
inline double hazard_from_spread(double sp, double delta, double t, double T) {
    if (!(t < T)) throw BadInterval("hazard needs t < T");
    const double tau = T - t;
    const double cap = -std::log(delta) / tau;
    if (!(sp >= 0.0 && sp < cap))
        throw SpreadTooLarge("spread " + std::to_string(sp) + " outside [0, " +
                             std::to_string(cap) + ") for the given recovery and tenor");
    return -std::log((std::exp(-tau * sp) - delta) / (1.0 - delta));
}

/// E[exp(mu int_0^T du / y_u)] for the square-root factor, in closed form
/// via the Gamma / confluent-hypergeometric representation.
///
/// The exponent index is nu = (2/sigma^2) sqrt((kappa theta - sigma^2/2)^2
/// - 2 mu sigma^2): the source formula is a Laplace transform in -mu, so the
/// radicand carries -2 mu sigma^2 here. Exponential moments of the
/// inverse-factor integral exist only up to +(kappa theta - sigma^2/2)^2 /
/// (2 sigma^2) (the Lamperti-clock tail rate), which is where the radicand
/// changes sign. Arguments at or beyond either signed boundary are rejected.
inline double laplace_exponential_inverse_integral(const CirParams& params, double mu,
                                                   double T) {
    params.validate();
    if (!(T > 0.0)) throw BadInterval("transform horizon must be positive");
    const double s2 = params.sigma * params.sigma;
    const double a = params.kappa * params.theta;
    const double boundary = -(a - 0.5 * s2) * (a - 0.5 * s2) / (2.0 * s2);
    if (!(mu > boundary))
        throw OutsideDomain("mu outside the transform's convergence set");
    if (mu == 0.0) return 1.0;

    const double radicand = (a - 0.5 * s2) * (a - 0.5 * s2) - 2.0 * mu * s2;
    if (!(radicand > 0.0))
        throw OutsideDomain("no finite exponential moment at this mu (tail rate exceeded)");

    const double kt = params.kappa * T;
    const double em = -std::expm1(-kt);              // 1 - e^{-kappa T}
    const double beta = 2.0 * params.kappa * params.y0 * std::exp(-kt) / (s2 * em);
    const double c = a / s2;
    const double delta_c = 2.0 * params.kappa / (s2 * em);
    const double nu = 2.0 / s2 * std::sqrt(radicand);
    const double order = c + 0.5 * nu + 0.5;

    // exponential prefactor with 2 y0 / (e^{kappa T} - 1) in underflow-safe form
    const double pref = params.kappa / s2 * (a * T - 2.0 * params.y0 * std::exp(-kt) / em);
    const double log_terms = log_gamma(order) - log_gamma(nu + 1.0) -
                             c * std::log(params.y0 * delta_c) +
                             (0.5 * nu + 0.5) * std::log(beta) + pref;
    return std::exp(log_terms) * kummer_1f1(order, nu + 1.0, beta);
}

/// Which printed form of the drift-shift coefficient gamma to use; the two
/// differ in the sign of the sigma^2/4 term.
enum class GammaConvention { minus_quarter_sigma2, plus_quarter_sigma2 };

struct NovikovReport {
    double gamma;
    double exponent_mu;     // 2 gamma^2
    double domain_boundary; // -(kappa theta - sigma^2/2)^2 / (2 sigma^2)
    bool passes;
};

/// Exponential-moment audit for the measure change: the bound reduces to
/// E[exp(2 gamma^2 int 1/y)] with gamma = (kappa theta - sigma^2/4)/sigma,
/// finite exactly when 2 gamma^2 exceeds the transform's domain boundary.
inline NovikovReport novikov_check(const CirParams& params,
                                   GammaConvention conv = GammaConvention::minus_quarter_sigma2) {
    params.validate();
    const double s2 = params.sigma * params.sigma;
    const double a = params.kappa * params.theta;
    const double quarter = 0.25 * s2;
    const double gamma =
        (conv == GammaConvention::minus_quarter_sigma2 ? a - quarter : a + quarter) /
        params.sigma;
    const double mu = 2.0 * gamma * gamma;
    const double boundary = -(a - 0.5 * s2) * (a - 0.5 * s2) / (2.0 * s2);
    return {gamma, mu, boundary, mu > boundary};
}

/// State equation for the intensity factor: dy = kappa (theta - y) dt + sigma sqrt(y) dW.
inline Diffusion1D cir_diffusion(const CirParams& params) {
    params.validate();
    Diffusion1D d;
    d.drift = [k = params.kappa, th = params.theta](double y) { return k * (th - y); };
    d.diffusion = [s = params.sigma](double y) { return s * std::sqrt(y); };
    d.diffusion_derivative = [s = params.sigma](double y) { return 0.5 * s / std::sqrt(y); };
    d.domain_lower = 0.0;
    d.initial_value = params.y0;
    return d;
}

/// Square-root transform x = sqrt(y) with noise scale sigma/2, together with
/// the antiderivative of the transformed drift
///   L(x) = 0.5 [ (kappa theta - sigma^2/4) / x - kappa x ].
inline ClosedFormTransform cir_closed_form_transform(const CirParams& params) {
    ClosedFormTransform c;
    c.phi = [](double y) { return std::sqrt(y); };
    c.phi_inverse = [](double x) { return x * x; };
    c.noise_scale = 0.5 * params.sigma;
    c.range_lower = 0.0;
    const double cdrift = params.kappa * params.theta - 0.25 * params.sigma * params.sigma;
    c.drift_antiderivative = [cdrift, k = params.kappa](double x) {
        return 0.5 * (cdrift * std::log(x) - 0.5 * k * x * x);
    };
    return c;
}

inline LampertiForm cir_lamperti(const CirParams& params) {
    return lamperti_transform(cir_diffusion(params), params.y0,
                              cir_closed_form_transform(params));
}

}  // namespace rwcredit
