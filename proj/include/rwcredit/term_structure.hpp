#pragma once

#include <cmath>

#include "rwcredit/cirpp.hpp"
#include "rwcredit/market_curve.hpp"

namespace rwcredit {

/// Deterministic fitting shift: psi(t) = lambda^m(t) + D(t) - y0 E(t),
/// so that the model intensity y(t) + psi(t) reprices the initial curve.
inline double psi(const CirParams& params, const MarketCurve& market, double t) {
    const auto [d_val, e_val] = d_e_functions(params, t);
    return market.instantaneous_hazard(t) + d_val - params.y0 * e_val;
}

/// ln of the state-independent survival prefactor
///   M(t,T) = S^m(0,T)/S^m(0,t) * A(0,t)/A(0,T) * e^{-B(0,t) y0}/e^{-B(0,T) y0} * A(t,T),
/// so that S(t,T) = M(t,T) e^{-B(t,T) y_t}.
inline double log_survival_prefactor(const CirParams& params, const MarketCurve& market,
                                     double t, double T) {
    if (t > T) throw BadInterval("survival prefactor needs t <= T");
    const double lam_m = market.cumulative_hazard_at(t) - market.cumulative_hazard_at(T);
    const double log_a = log_bond_a(params, t) - log_bond_a(params, T) +
                         log_bond_a(params, T - t);
    const double b_term = (bond_b(params, T) - bond_b(params, t)) * params.y0;
    return lam_m + log_a + b_term;
}

/// S(t,T) given the factor level y_t; fits S^m(0,T) exactly at t = 0.
inline double survival_probability(const CirParams& params, const MarketCurve& market,
                                   double t, double T, double y_t) {
    return std::exp(log_survival_prefactor(params, market, t, T) -
                    bond_b(params, T - t) * y_t);
}

/// Lambda(t,T) = -ln S(t,T); affine in y_t with slope B(t,T).
inline double cumulative_hazard(const CirParams& params, const MarketCurve& market,
                                double t, double T, double y_t) {
    return -log_survival_prefactor(params, market, t, T) + bond_b(params, T - t) * y_t;
}

/// Sp(t,T) = -(1/(T-t)) ln[delta + (1-delta) S(t,T)].
inline double credit_spread(const CirParams& params, const MarketCurve& market, double t,
                            double T, double y_t) {
    if (!(t < T)) throw BadInterval("credit spread needs t < T");
    const double s = survival_probability(params, market, t, T, y_t);
    return -std::log(params.recovery_delta + (1.0 - params.recovery_delta) * s) / (T - t);
}

}  // namespace rwcredit
