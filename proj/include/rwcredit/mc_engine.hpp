#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "rwcredit/errors.hpp"
#include "rwcredit/market_curve.hpp"
#include "rwcredit/measure_change.hpp"
#include "rwcredit/rng.hpp"
#include "rwcredit/term_structure.hpp"

namespace rwcredit {

/// Uniform simulation grid t_k = start + k * step, k = 0..n_steps.
struct PathGrid {
    double start = 0.0;
    double step = 1.0 / 52.0;
    std::size_t n_steps = 52;

    std::size_t n_times() const { return n_steps + 1; }
    double time_at(std::size_t k) const { return start + step * static_cast<double>(k); }

    /// Grid index of a date; the date must lie on the grid.
    std::size_t index_of(double t) const {
        const double raw = (t - start) / step;
        const auto k = static_cast<std::size_t>(std::llround(raw));
        if (k > n_steps || std::fabs(time_at(k) - t) > 1e-9)
            throw GridMismatch("date " + std::to_string(t) + " does not lie on the grid");
        return k;
    }
};

/// Simulated factor paths, one row per path.
struct Ensemble {
    PathGrid grid;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> y;                       // n_paths x n_times
    std::vector<std::size_t> violation_count;    // per time, filled by the shift pass

    double y_at(std::size_t path, std::size_t k) const {
        return y[path * grid.n_times() + k];
    }
};

/// Dense per-path per-time values for one derived quantity.
struct PathMatrix {
    std::size_t n_paths = 0;
    std::size_t n_times = 0;
    std::vector<double> data;

    PathMatrix() = default;
    PathMatrix(std::size_t paths, std::size_t times)
        : n_paths(paths), n_times(times), data(paths * times) {}
    double& at(std::size_t p, std::size_t k) { return data[p * n_times + k]; }
    double at(std::size_t p, std::size_t k) const { return data[p * n_times + k]; }
};

struct SummaryStats {
    std::vector<double> mean, se, q10, q90;  // one entry per time column
};

/// Worker cap: RWKIT_THREADS if set, hardware concurrency otherwise.
inline unsigned worker_count() {
    if (const char* env = std::getenv("RWKIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace detail {

/// Run fn(path) for every path index, chunked across workers. Each path
/// writes only its own row, so the result is independent of the worker count.
template <class Fn>
void parallel_over_paths(std::size_t n_paths, const Fn& fn) {
    const unsigned workers = std::min<unsigned>(worker_count(),
                                                static_cast<unsigned>(std::max<std::size_t>(n_paths, 1)));
    if (workers <= 1) {
        for (std::size_t p = 0; p < n_paths; ++p) fn(p);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * chunk;
        const std::size_t hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t p = lo; p < hi; ++p) fn(p);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// One exact transition of the square-root factor over dt. The conditional
/// law is noncentral chi-square with nu = 4 kappa theta / sigma^2 degrees of
/// freedom and noncentrality 2 c y_s e^{-kappa dt}, scaled by 1/(2c) with
/// c = 2 kappa / (sigma^2 (1 - e^{-kappa dt})).
inline double sample_cir_transition(double y_s, double dt, const CirParams& params,
                                    PathRng& rng) {
    if (!(y_s > 0.0)) throw DomainViolation("transition needs a positive state");
    if (!(dt > 0.0)) throw BadInterval("transition needs dt > 0");
    const double decay = std::exp(-params.kappa * dt);
    const double c = 2.0 * params.kappa /
                     (params.sigma * params.sigma * (-std::expm1(-params.kappa * dt)));
    const double noncentrality = 2.0 * c * y_s * decay;
    const double nu = 4.0 * params.kappa * params.theta / (params.sigma * params.sigma);
    double chi2;
    if (nu > 1.0) {
        const double z = rng.next_normal() + std::sqrt(noncentrality);
        chi2 = z * z + 2.0 * rng.next_gamma(0.5 * (nu - 1.0));
    } else {
        const auto k = static_cast<double>(rng.next_poisson(0.5 * noncentrality));
        chi2 = 2.0 * rng.next_gamma(0.5 * nu + k);
    }
    return chi2 / (2.0 * c);
}

/// Simulate n_paths factor paths from y0 with per-path substreams keyed on
/// (seed, path index); bit-stable for any worker count.
inline Ensemble simulate_ensemble(const CirParams& params, const PathGrid& grid,
                                  std::size_t n_paths, std::uint64_t seed) {
    params.validate();
    if (n_paths < 1) throw ValidationError("need at least one path");
    Ensemble e;
    e.grid = grid;
    e.n_paths = n_paths;
    e.seed = seed;
    e.y.resize(n_paths * grid.n_times());
    e.violation_count.assign(grid.n_times(), 0);
    detail::parallel_over_paths(n_paths, [&](std::size_t p) {
        PathRng rng(seed, p);
        double* row = e.y.data() + p * grid.n_times();
        row[0] = params.y0;
        for (std::size_t k = 0; k < grid.n_steps; ++k)
            row[k + 1] = sample_cir_transition(row[k], grid.step, params, rng);
    });
    return e;
}

/// Per-cell constants of the affine hazard map Lambda = -ln M + B y for a
/// fixed tenor: intercept per time, one slope.
struct HazardCells {
    std::vector<double> intercept;  // -ln M(t_k, t_k + tenor)
    double slope = 0.0;             // B over the tenor
};

inline HazardCells hazard_cells(const CirParams& params, const MarketCurve& market,
                                const PathGrid& grid, double tenor) {
    HazardCells cells;
    cells.slope = bond_b(params, tenor);
    cells.intercept.resize(grid.n_times());
    for (std::size_t k = 0; k < grid.n_times(); ++k) {
        const double t = grid.time_at(k);
        cells.intercept[k] = -log_survival_prefactor(params, market, t, t + tenor);
    }
    return cells;
}

/// Risk-neutral per-path functionals over rolling tenors.
struct RnFunctionals {
    std::vector<double> tenors;
    std::vector<PathMatrix> lambda_big;  // Lambda(t, t+tenor), one matrix per tenor
    std::vector<PathMatrix> spread;      // Sp(t, t+tenor)
};

inline RnFunctionals rn_functionals(const Ensemble& e, const CirParams& params,
                                    const MarketCurve& market,
                                    const std::vector<double>& tenors) {
    RnFunctionals out;
    out.tenors = tenors;
    const std::size_t nt = e.grid.n_times();
    const double delta = params.recovery_delta;
    for (double tenor : tenors) {
        if (!(tenor > 0.0)) throw BadInterval("report tenor must be positive");
        const HazardCells cells = hazard_cells(params, market, e.grid, tenor);
        PathMatrix lam(e.n_paths, nt), sp(e.n_paths, nt);
        detail::parallel_over_paths(e.n_paths, [&](std::size_t p) {
            for (std::size_t k = 0; k < nt; ++k) {
                const double l = cells.intercept[k] + cells.slope * e.y_at(p, k);
                lam.at(p, k) = l;
                sp.at(p, k) = spread_from_hazard(l, delta, 0.0, tenor);
            }
        });
        out.lambda_big.push_back(std::move(lam));
        out.spread.push_back(std::move(sp));
    }
    return out;
}

/// Sample means (with standard errors) of Lambda(t_i, t_i + T~) and
/// sqrt(y(t_i)) at the target dates, taken over the simulated ensemble.
inline std::vector<RnDateStats> rn_calibration_stats(const Ensemble& e,
                                                     const CirParams& params,
                                                     const MarketCurve& market,
                                                     const TargetSet& targets) {
    targets.validate();
    const HazardCells cells = hazard_cells(params, market, e.grid, targets.target_maturity);
    std::vector<RnDateStats> stats;
    stats.reserve(targets.dates.size());
    const auto n = static_cast<double>(e.n_paths);
    for (double date : targets.dates) {
        const std::size_t k = e.grid.index_of(date);
        double sum_l = 0.0, sum_l2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
        for (std::size_t p = 0; p < e.n_paths; ++p) {
            const double lam = cells.intercept[k] + cells.slope * e.y_at(p, k);
            const double root = std::sqrt(e.y_at(p, k));
            sum_l += lam;
            sum_l2 += lam * lam;
            sum_r += root;
            sum_r2 += root * root;
        }
        RnDateStats s;
        s.e_lambda = sum_l / n;
        s.e_sqrt_y = sum_r / n;
        if (e.n_paths > 1) {
            s.se_lambda = std::sqrt(std::max(0.0, (sum_l2 - n * s.e_lambda * s.e_lambda) / (n - 1.0)) / n);
            s.se_sqrt_y = std::sqrt(std::max(0.0, (sum_r2 - n * s.e_sqrt_y * s.e_sqrt_y) / (n - 1.0)) / n);
        }
        stats.push_back(s);
    }
    return stats;
}

/// Shifted per-path functionals plus the intensity path lambda*.
struct RwFunctionals {
    std::vector<double> tenors;
    std::vector<PathMatrix> lambda_big_star;
    std::vector<PathMatrix> spread_star;
    PathMatrix lambda_star;                    // intensity, tenor-independent
    std::vector<double> f_path;                // f on the grid
    std::vector<std::size_t> violations;       // sqrt(y)+f < 0, per time
    std::vector<std::vector<std::size_t>> negative_hazard;  // per tenor, per time
};

/// Apply the drift shift pathwise: Lambda* = Lambda + B F, Sp* back out of
/// the shifted hazard, lambda* through the floored intensity shift.
/// Violation tallies are merged into the ensemble.
inline RwFunctionals rw_transform_ensemble(Ensemble& e, const CirParams& params,
                                           const MarketCurve& market,
                                           const StepAlpha& alpha,
                                           const std::vector<double>& tenors) {
    const std::size_t nt = e.grid.n_times();
    const double delta = params.recovery_delta;

    RwFunctionals out;
    out.tenors = tenors;
    out.f_path.resize(nt);
    for (std::size_t k = 0; k < nt; ++k)
        out.f_path[k] = f_from_alpha(alpha, params.kappa, e.grid.time_at(k));

    // (sqrt(y) + f)^2 - y, reused across tenors; violations counted once
    PathMatrix shift_term(e.n_paths, nt);
    out.violations.assign(nt, 0);
    detail::parallel_over_paths(e.n_paths, [&](std::size_t p) {
        for (std::size_t k = 0; k < nt; ++k)
            shift_term.at(p, k) = intensity_shift_term(e.y_at(p, k), out.f_path[k]);
    });
    for (std::size_t p = 0; p < e.n_paths; ++p)
        for (std::size_t k = 0; k < nt; ++k)
            if (std::sqrt(e.y_at(p, k)) + out.f_path[k] < 0.0) ++out.violations[k];
    if (e.violation_count.size() != nt) e.violation_count.assign(nt, 0);
    for (std::size_t k = 0; k < nt; ++k) e.violation_count[k] += out.violations[k];

    // intensity path: lambda* = y + psi + shift (floored form via shift_intensity)
    out.lambda_star = PathMatrix(e.n_paths, nt);
    std::vector<double> psi_path(nt);
    for (std::size_t k = 0; k < nt; ++k) psi_path[k] = psi(params, market, e.grid.time_at(k));
    detail::parallel_over_paths(e.n_paths, [&](std::size_t p) {
        for (std::size_t k = 0; k < nt; ++k) {
            const double y = e.y_at(p, k);
            out.lambda_star.at(p, k) = shift_intensity(y + psi_path[k], y, out.f_path[k]);
        }
    });

    for (double tenor : tenors) {
        const HazardCells cells = hazard_cells(params, market, e.grid, tenor);
        PathMatrix lam(e.n_paths, nt), sp(e.n_paths, nt);
        detail::parallel_over_paths(e.n_paths, [&](std::size_t p) {
            for (std::size_t k = 0; k < nt; ++k) {
                const double l0 = cells.intercept[k] + cells.slope * e.y_at(p, k);
                const double l = l0 + cells.slope * shift_term.at(p, k);
                lam.at(p, k) = l;
                sp.at(p, k) = spread_from_hazard(l, delta, 0.0, tenor);
            }
        });
        std::vector<std::size_t> neg(nt, 0);
        for (std::size_t p = 0; p < e.n_paths; ++p)
            for (std::size_t k = 0; k < nt; ++k)
                if (lam.at(p, k) < 0.0) ++neg[k];
        out.lambda_big_star.push_back(std::move(lam));
        out.spread_star.push_back(std::move(sp));
        out.negative_hazard.push_back(std::move(neg));
    }
    return out;
}

/// Column-wise mean, standard error and type-7 percentiles (0.10, 0.90).
inline SummaryStats summarize(const PathMatrix& values) {
    if (values.n_paths < 10)
        throw TooFewPaths("percentile summary needs at least 10 paths");
    SummaryStats s;
    s.mean.resize(values.n_times);
    s.se.resize(values.n_times);
    s.q10.resize(values.n_times);
    s.q90.resize(values.n_times);
    const auto n = static_cast<double>(values.n_paths);
    std::vector<double> col(values.n_paths);
    for (std::size_t k = 0; k < values.n_times; ++k) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t p = 0; p < values.n_paths; ++p) {
            col[p] = values.at(p, k);
            sum += col[p];
            sum2 += col[p] * col[p];
        }
        s.mean[k] = sum / n;
        s.se[k] = values.n_paths > 1
                      ? std::sqrt(std::max(0.0, (sum2 - n * s.mean[k] * s.mean[k]) / (n - 1.0)) / n)
                      : 0.0;
        std::sort(col.begin(), col.end());
        auto quantile = [&](double q) {
            const double h = q * (n - 1.0);
            const auto lo = static_cast<std::size_t>(h);
            const double frac = h - static_cast<double>(lo);
            return lo + 1 < col.size() ? col[lo] + frac * (col[lo + 1] - col[lo]) : col[lo];
        };
        s.q10[k] = quantile(0.10);
        s.q90[k] = quantile(0.90);
    }
    return s;
}

}  // namespace rwcredit
