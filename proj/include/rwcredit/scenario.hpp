#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwcredit/errors.hpp"
#include "rwcredit/mc_engine.hpp"
#include "rwcredit/svg.hpp"

namespace rwcredit {

inline constexpr const char* kVersion = "0.1.0";

enum class ScenarioKind { forecast, stress };
enum class TargetUnit { bp_spread, hazard };
enum class TargetFill { hold_previous, linear_ramp };

struct TargetPoint {
    double date;   // years
    double value;  // bp for bp_spread, level for hazard
    TargetUnit unit = TargetUnit::bp_spread;
};

/// Full run definition, mirrored one-to-one by the JSON config.
struct ScenarioSpec {
    CirParams model{};
    std::string curve_file;
    ScenarioKind scenario_kind = ScenarioKind::forecast;
    double target_maturity = 5.0;
    std::vector<TargetPoint> targets;
    TargetFill target_fill = TargetFill::hold_previous;
    double grid_step = 1.0 / 52.0;
    double horizon = 1.0;
    std::size_t n_paths = 20000;
    std::uint64_t seed = 0;
    std::vector<double> report_maturities = {1, 2, 3, 4, 5, 7, 10};
    std::string output_dir = "out";

    std::string config_path;  // provenance
    std::string config_hash;

    void validate() const {
        model.validate();
        if (curve_file.empty()) throw ValidationError("field 'curve_file' is required");
        if (!(target_maturity > 0.0))
            throw ValidationError("field 'target_maturity' must be positive");
        if (!(grid_step > 0.0)) throw ValidationError("field 'grid_step' must be positive");
        if (!(horizon > 0.0)) throw ValidationError("field 'horizon' must be positive");
        if (n_paths < 100) throw ValidationError("field 'n_paths' must be at least 100");
        if (targets.empty()) throw ValidationError("field 'targets' must be non-empty");
        double prev = 0.0;
        for (const auto& tp : targets) {
            if (!(tp.date > 0.0 && tp.date <= horizon))
                throw ValidationError("target dates must lie in (0, horizon]");
            if (!(tp.date > prev))
                throw ValidationError("target dates must be strictly increasing");
            if (!(tp.value > 0.0) && tp.unit == TargetUnit::bp_spread)
                throw ValidationError("spread targets must be positive");
            if (tp.value < 0.0) throw ValidationError("hazard targets must be nonnegative");
            prev = tp.date;
        }
        if (report_maturities.empty())
            throw ValidationError("field 'report_maturities' must be non-empty");
        for (double m : report_maturities)
            if (!(m > 0.0)) throw ValidationError("report maturities must be positive");
    }

    PathGrid grid() const {
        PathGrid g;
        g.start = 0.0;
        g.step = grid_step;
        const double raw = horizon / grid_step;
        g.n_steps = static_cast<std::size_t>(std::llround(raw));
        if (g.n_steps < 1 || std::fabs(g.time_at(g.n_steps) - horizon) > 1e-9)
            throw ValidationError("'horizon' must be a whole number of grid steps");
        return g;
    }
};

/// Everything a finished run reports.
struct ReportBundle {
    CalibrationResult calibration;
    TargetSet targets;                       // expanded, hazard units
    std::vector<double> target_spread_bp;    // per grid time; [0] is the anchor
    std::vector<double> target_dates;        // grid times 1..n
    SummaryStats spread_stats;               // Sp* at the target tenor, per grid time
    std::vector<double> lambda_star_mean;    // per target date
    std::vector<double> lambda_star_se;      // per target date
    std::vector<double> snapshot_dates;
    std::vector<std::vector<double>> term_structure_mean_bp;  // [snapshot][maturity]
    std::vector<std::size_t> violations_per_time;
    std::vector<std::size_t> negative_hazard_per_time;  // at the target tenor
    NovikovReport novikov{};
    bool all_targets_hit = false;
    bool risk_neutral_only = false;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

/// Map an index forecast path onto an issuer anchor by relative changes,
/// rounding to whole basis points. The first index entry is the reference
/// level; one output per later entry.
inline std::vector<std::pair<double, double>> translate_relative_forecast(
    const std::vector<std::pair<double, double>>& index_path, double issuer_anchor_bp) {
    if (index_path.size() < 2)
        throw ValidationError("index path needs the reference entry plus at least one forecast");
    if (!(issuer_anchor_bp > 0.0)) throw NonPositiveSpread("issuer anchor must be positive");
    for (const auto& [date, bp] : index_path)
        if (!(bp > 0.0)) throw NonPositiveSpread("index spreads must be positive");
    const double reference = index_path.front().second;
    std::vector<std::pair<double, double>> out;
    out.reserve(index_path.size() - 1);
    for (std::size_t i = 1; i < index_path.size(); ++i)
        out.emplace_back(index_path[i].first,
                         std::round(issuer_anchor_bp * index_path[i].second / reference));
    return out;
}

inline ScenarioSpec load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string raw = buffer.str();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config is not valid JSON: " + std::string(e.what()));
    }

    auto require = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field))
            throw ValidationError("field '" + std::string(field) + "' is required");
        return j.at(field);
    };

    ScenarioSpec spec;
    try {
        const auto& model = require("model");
        spec.model.kappa = model.at("kappa").get<double>();
        spec.model.theta = model.at("theta").get<double>();
        spec.model.sigma = model.at("sigma").get<double>();
        spec.model.y0 = model.at("y0").get<double>();
        spec.model.recovery_delta = model.at("recovery_delta").get<double>();
        spec.curve_file = require("curve_file").get<std::string>();

        const std::string kind = require("scenario_kind").get<std::string>();
        if (kind == "forecast") spec.scenario_kind = ScenarioKind::forecast;
        else if (kind == "stress") spec.scenario_kind = ScenarioKind::stress;
        else throw ValidationError("field 'scenario_kind' must be 'forecast' or 'stress'");

        spec.target_maturity = require("target_maturity").get<double>();

        const std::string fill = require("target_fill").get<std::string>();
        if (fill == "hold-previous") spec.target_fill = TargetFill::hold_previous;
        else if (fill == "linear-ramp") spec.target_fill = TargetFill::linear_ramp;
        else throw ValidationError("field 'target_fill' must be 'hold-previous' or 'linear-ramp'");

        for (const auto& t : require("targets")) {
            TargetPoint tp;
            tp.date = t.at("date").get<double>();
            tp.value = t.at("value").get<double>();
            const std::string unit = t.value("unit", "bp-spread");
            if (unit == "bp-spread") tp.unit = TargetUnit::bp_spread;
            else if (unit == "hazard") tp.unit = TargetUnit::hazard;
            else throw ValidationError("target unit must be 'bp-spread' or 'hazard'");
            spec.targets.push_back(tp);
        }

        spec.grid_step = j.value("grid_step", 1.0 / 52.0);
        spec.horizon = j.value("horizon", 1.0);
        spec.n_paths = j.value("n_paths", static_cast<std::size_t>(20000));
        spec.seed = j.value("seed", static_cast<std::uint64_t>(0));
        if (j.contains("report_maturities"))
            spec.report_maturities = j.at("report_maturities").get<std::vector<double>>();
        spec.output_dir = j.value("output_dir", std::string("out"));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config field error: " + std::string(e.what()));
    }

    spec.config_path = path;
    spec.config_hash = detail::fnv1a_hex(raw);
    spec.validate();

    // curve path is resolved relative to the config file
    const auto dir = std::filesystem::path(path).parent_path();
    const std::filesystem::path curve(spec.curve_file);
    if (curve.is_relative()) spec.curve_file = (dir / curve).string();
    return spec;
}

/// Expanded per-grid-date targets: spreads in bp (for reporting) and the
/// hazard TargetSet driving calibration. Spread/hazard conversion always
/// uses the target tenor.
struct ExpandedTargets {
    TargetSet set;
    std::vector<double> spread_bp;  // per grid time including t = 0
};

inline ExpandedTargets expand_targets(const ScenarioSpec& spec, const MarketCurve& curve) {
    const PathGrid grid = spec.grid();
    const double tenor = spec.target_maturity;
    const double delta = spec.model.recovery_delta;
    const double anchor_hazard = curve.cumulative_hazard_at(tenor);
    const double anchor_bp = spread_from_hazard(anchor_hazard, delta, 0.0, tenor) * 1e4;

    auto to_hazard = [&](const TargetPoint& tp) {
        return tp.unit == TargetUnit::hazard
                   ? tp.value
                   : hazard_from_spread(tp.value * 1e-4, delta, 0.0, tenor);
    };
    auto to_bp = [&](double hazard) {
        return spread_from_hazard(hazard, delta, 0.0, tenor) * 1e4;
    };

    // anchor dates must sit on the grid so the tracked dates are simulated
    for (const auto& tp : spec.targets) {
        try {
            grid.index_of(tp.date);
        } catch (const GridMismatch&) {
            throw ValidationError("target date " + std::to_string(tp.date) +
                                  " does not lie on the simulation grid");
        }
    }

    ExpandedTargets out;
    out.set.target_maturity = tenor;
    out.spread_bp.assign(grid.n_times(), anchor_bp);

    if (spec.target_fill == TargetFill::hold_previous) {
        for (std::size_t k = 1; k < grid.n_times(); ++k) {
            const double t = grid.time_at(k);
            // value of the first anchor at or after t; the last anchor holds beyond
            const TargetPoint* pick = &spec.targets.back();
            for (const auto& tp : spec.targets)
                if (tp.date >= t - 1e-9) {
                    pick = &tp;
                    break;
                }
            const double hazard = to_hazard(*pick);
            out.set.dates.push_back(t);
            out.set.values.push_back(hazard);
            out.spread_bp[k] = to_bp(hazard);
        }
    } else {
        // linear ramp through (0, current level) and the anchors, in the
        // quoted unit; held flat beyond the last anchor
        const TargetUnit unit = spec.targets.front().unit;
        for (const auto& tp : spec.targets)
            if (tp.unit != unit)
                throw ValidationError("linear-ramp targets must share one unit");
        std::vector<std::pair<double, double>> nodes;
        nodes.emplace_back(0.0, unit == TargetUnit::bp_spread ? anchor_bp : anchor_hazard);
        for (const auto& tp : spec.targets) nodes.emplace_back(tp.date, tp.value);
        auto ramp_value = [&](double t) {
            if (t >= nodes.back().first) return nodes.back().second;
            for (std::size_t i = 1; i < nodes.size(); ++i)
                if (t <= nodes[i].first) {
                    const auto& [t0, v0] = nodes[i - 1];
                    const auto& [t1, v1] = nodes[i];
                    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
                }
            return nodes.back().second;
        };
        for (std::size_t k = 1; k < grid.n_times(); ++k) {
            const double t = grid.time_at(k);
            const double v = ramp_value(t);
            const double hazard = unit == TargetUnit::hazard
                                      ? v
                                      : hazard_from_spread(v * 1e-4, delta, 0.0, tenor);
            out.set.dates.push_back(t);
            out.set.values.push_back(hazard);
            out.spread_bp[k] = to_bp(hazard);
        }
    }
    out.set.validate();
    return out;
}

/// The full pipeline: ingest the curve, simulate the risk-neutral ensemble,
/// calibrate the drift shift to the expanded targets, apply the shift
/// pathwise and summarize. When risk_neutral_only is set the shift step is
/// skipped (alpha held at zero) and the report describes the plain ensemble.
inline ReportBundle run_scenario(const ScenarioSpec& spec, bool risk_neutral_only = false) {
    spec.validate();
    const MarketCurve curve =
        ingest_spread_curve_file(spec.curve_file, spec.model.recovery_delta);
    if (spec.target_maturity > curve.max_tenor())
        throw CurveOutOfRange("target maturity extends beyond the market curve");
    double max_tenor_needed = spec.target_maturity;
    for (double m : spec.report_maturities) max_tenor_needed = std::max(max_tenor_needed, m);
    if (spec.horizon + max_tenor_needed > curve.max_tenor() + 1e-9)
        throw CurveOutOfRange("market curve too short: need tenors up to " +
                              std::to_string(spec.horizon + max_tenor_needed));

    const PathGrid grid = spec.grid();
    ExpandedTargets expanded = expand_targets(spec, curve);

    Ensemble ensemble = simulate_ensemble(spec.model, grid, spec.n_paths, spec.seed);
    const std::vector<RnDateStats> stats =
        rn_calibration_stats(ensemble, spec.model, curve, expanded.set);

    ReportBundle bundle;
    bundle.targets = expanded.set;
    bundle.target_spread_bp = expanded.spread_bp;
    bundle.target_dates = expanded.set.dates;
    bundle.novikov = novikov_check(spec.model);
    bundle.config_hash = spec.config_hash;
    bundle.seed = spec.seed;
    bundle.n_paths = spec.n_paths;
    bundle.risk_neutral_only = risk_neutral_only;

    if (risk_neutral_only) {
        bundle.calibration.alpha =
            StepAlpha(std::vector<double>{0.0}, std::vector<double>{0.0});
        bundle.calibration.f_at_knots.assign(expanded.set.dates.size(), 0.0);
    } else {
        const std::vector<double> b_lookup(
            expanded.set.dates.size(), bond_b(spec.model, spec.target_maturity));
        bundle.calibration =
            calibrate_alpha(expanded.set, stats, b_lookup, spec.model.kappa, grid.start);
    }

    RwFunctionals rw = rw_transform_ensemble(ensemble, spec.model, curve,
                                             bundle.calibration.alpha,
                                             {spec.target_maturity});
    bundle.spread_stats = summarize(rw.spread_star[0]);
    bundle.violations_per_time = rw.violations;
    bundle.negative_hazard_per_time = rw.negative_hazard[0];

    // achieved hazard means vs targets, and the exit contract
    bundle.all_targets_hit = true;
    const auto n = static_cast<double>(ensemble.n_paths);
    for (std::size_t i = 0; i < expanded.set.dates.size(); ++i) {
        const std::size_t k = grid.index_of(expanded.set.dates[i]);
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
            const double v = rw.lambda_big_star[0].at(p, k);
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / n;
        const double se =
            std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0)) / n);
        bundle.lambda_star_mean.push_back(mean);
        bundle.lambda_star_se.push_back(se);
        if (!risk_neutral_only &&
            std::fabs(mean - expanded.set.values[i]) > 3.0 * se)
            bundle.all_targets_hit = false;
    }

    // term-structure snapshots at t = 0 and the configured anchor dates
    bundle.snapshot_dates.push_back(0.0);
    for (const auto& tp : spec.targets) bundle.snapshot_dates.push_back(tp.date);
    for (double snap : bundle.snapshot_dates) {
        const std::size_t k = grid.index_of(snap);
        std::vector<double> row;
        row.reserve(spec.report_maturities.size());
        for (double m : spec.report_maturities) {
            const double intercept =
                -log_survival_prefactor(spec.model, curve, snap, snap + m);
            const double slope = bond_b(spec.model, m);
            double sum = 0.0;
            for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
                const double y = ensemble.y_at(p, k);
                const double shift = intensity_shift_term(y, rw.f_path[k]);
                const double lam = intercept + slope * (y + shift);
                sum += spread_from_hazard(lam, spec.model.recovery_delta, 0.0, m);
            }
            row.push_back(sum / n * 1e4);
        }
        bundle.term_structure_mean_bp.push_back(std::move(row));
    }
    return bundle;
}

/// Write the CSV/JSON/SVG artifacts for a finished run.
inline void emit_reports(const ReportBundle& bundle, const ScenarioSpec& spec) {
    namespace fs = std::filesystem;
    const fs::path dir(spec.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    const PathGrid grid = spec.grid();

    {
        std::ofstream out(dir / "target_tracking.csv");
        if (!out) throw IoError("cannot write target_tracking.csv");
        out << "t_years,target_bp,mean_bp,se_bp,q10_bp,q90_bp\n";
        for (std::size_t k = 0; k < grid.n_times(); ++k) {
            out << detail::csv_num(grid.time_at(k)) << ','
                << detail::csv_num(bundle.target_spread_bp[k]) << ','
                << detail::csv_num(bundle.spread_stats.mean[k] * 1e4) << ','
                << detail::csv_num(bundle.spread_stats.se[k] * 1e4) << ','
                << detail::csv_num(bundle.spread_stats.q10[k] * 1e4) << ','
                << detail::csv_num(bundle.spread_stats.q90[k] * 1e4) << '\n';
        }
    }
    {
        std::ofstream out(dir / "term_structure.csv");
        if (!out) throw IoError("cannot write term_structure.csv");
        out << "t_years,maturity_years,mean_spread_bp\n";
        for (std::size_t s = 0; s < bundle.snapshot_dates.size(); ++s)
            for (std::size_t m = 0; m < spec.report_maturities.size(); ++m)
                out << detail::csv_num(bundle.snapshot_dates[s]) << ','
                    << detail::csv_num(spec.report_maturities[m]) << ','
                    << detail::csv_num(bundle.term_structure_mean_bp[s][m]) << '\n';
    }
    {
        std::ofstream out(dir / "alpha.csv");
        if (!out) throw IoError("cannot write alpha.csv");
        out << "step_start_years,alpha,target_date_years,f_at_target\n";
        const auto& cal = bundle.calibration;
        for (std::size_t i = 0; i < cal.alpha.knot_times.size(); ++i) {
            const double date = i < bundle.targets.dates.size() ? bundle.targets.dates[i]
                                                                : cal.alpha.knot_times[i];
            const double f = i < cal.f_at_knots.size() ? cal.f_at_knots[i] : 0.0;
            out << detail::csv_num(cal.alpha.knot_times[i]) << ','
                << detail::csv_num(cal.alpha.values[i]) << ',' << detail::csv_num(date)
                << ',' << detail::csv_num(f) << '\n';
        }
    }
    {
        nlohmann::json diag;
        diag["version"] = kVersion;
        diag["config_hash"] = bundle.config_hash;
        diag["seed"] = bundle.seed;
        diag["n_paths"] = bundle.n_paths;
        diag["risk_neutral_only"] = bundle.risk_neutral_only;
        diag["all_targets_hit"] = bundle.all_targets_hit;
        diag["novikov"] = {{"gamma", bundle.novikov.gamma},
                           {"exponent_mu", bundle.novikov.exponent_mu},
                           {"domain_boundary", bundle.novikov.domain_boundary},
                           {"passes", bundle.novikov.passes}};
        diag["calibration_measure_note"] =
            "Calibration expectations are sample means from the risk-neutral ensemble. "
            "Under the shifted measure the factor follows the same square-root dynamics, "
            "so expectations sampled there would not depend on the shift; the sequential "
            "solve therefore uses the risk-neutral sample throughout.";
        std::size_t total_viol = 0;
        for (std::size_t v : bundle.violations_per_time) total_viol += v;
        std::size_t total_neg = 0;
        for (std::size_t v : bundle.negative_hazard_per_time) total_neg += v;
        diag["domain_violations_total"] = total_viol;
        diag["negative_hazard_total"] = total_neg;
        nlohmann::json per_date = nlohmann::json::array();
        for (std::size_t i = 0; i < bundle.target_dates.size(); ++i) {
            const std::size_t k = grid.index_of(bundle.target_dates[i]);
            per_date.push_back(
                {{"date", bundle.target_dates[i]},
                 {"target_hazard", bundle.targets.values[i]},
                 {"achieved_mean", bundle.lambda_star_mean[i]},
                 {"se", bundle.lambda_star_se[i]},
                 {"violations", bundle.violations_per_time[k]},
                 {"negative_hazard", bundle.negative_hazard_per_time[k]},
                 {"hit", std::fabs(bundle.lambda_star_mean[i] - bundle.targets.values[i]) <=
                             3.0 * bundle.lambda_star_se[i]}});
        }
        diag["targets"] = std::move(per_date);
        std::ofstream out(dir / "diagnostics.json");
        if (!out) throw IoError("cannot write diagnostics.json");
        out << diag.dump(2) << '\n';
    }

    // charts
    {
        std::vector<SvgSeries> series(4);
        series[0] = {"target", "#c0392b", {}, true};
        series[1] = {"mean", "#111111", {}, false};
        series[2] = {"q10", "#2a6f97", {}, false};
        series[3] = {"q90", "#2a6f97", {}, false};
        for (std::size_t k = 0; k < grid.n_times(); ++k) {
            const double t = grid.time_at(k);
            series[0].points.emplace_back(t, bundle.target_spread_bp[k]);
            series[1].points.emplace_back(t, bundle.spread_stats.mean[k] * 1e4);
            series[2].points.emplace_back(t, bundle.spread_stats.q10[k] * 1e4);
            series[3].points.emplace_back(t, bundle.spread_stats.q90[k] * 1e4);
        }
        char title[128];
        std::snprintf(title, sizeof(title), "%gy spread: simulated vs target (bp)",
                      spec.target_maturity);
        write_line_chart((dir / "target_tracking.svg").string(), title, "t (years)",
                         "spread (bp)", series);
    }
    {
        std::vector<SvgSeries> series;
        static constexpr const char* palette[] = {"#111111", "#c0392b", "#2a6f97",
                                                  "#e67e22", "#27ae60", "#8e44ad"};
        for (std::size_t s = 0; s < bundle.snapshot_dates.size(); ++s) {
            SvgSeries sr;
            char label[48];
            std::snprintf(label, sizeof(label), "t=%.4g", bundle.snapshot_dates[s]);
            sr.label = label;
            sr.color = palette[s % 6];
            for (std::size_t m = 0; m < spec.report_maturities.size(); ++m)
                sr.points.emplace_back(spec.report_maturities[m],
                                       bundle.term_structure_mean_bp[s][m]);
            series.push_back(std::move(sr));
        }
        write_line_chart((dir / "term_structure.svg").string(),
                         "Mean spread term structure (bp)", "maturity (years)",
                         "spread (bp)", series);
    }
}

}  // namespace rwcredit
