#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rwcredit/cirpp.hpp"
#include "rwcredit/errors.hpp"

namespace rwcredit {

/// Initial market credit term structure. Knots carry quoted spreads; the
/// derived survival / cumulative-hazard columns are computed once on
/// ingestion. Interpolation is piecewise-linear in cumulative hazard, which
/// makes the forward hazard piecewise-constant (right-limit at knots).
class MarketCurve {
public:
    struct Knot {
        double tenor;      // years
        double spread;     // decimal rate
        double survival;   // S^m(0, tenor)
        double cum_hazard; // Lambda^m(0, tenor)
    };

    MarketCurve(double recovery_delta, std::vector<std::pair<double, double>> tenor_spread,
                std::string as_of = {})
        : recovery_delta_(recovery_delta), as_of_(std::move(as_of)) {
        if (!(recovery_delta >= 0.0 && recovery_delta < 1.0))
            throw ValidationError("recovery rate must lie in [0,1)");
        if (tenor_spread.empty()) throw ValidationError("curve needs at least one knot");
        knots_.reserve(tenor_spread.size());
        double prev_tenor = 0.0;
        double prev_hazard = 0.0;
        for (auto [tenor, spread] : tenor_spread) {
            if (!(tenor > prev_tenor))
                throw MonotonicityViolation("curve tenors must be positive and strictly increasing");
            double hazard;
            try {
                hazard = hazard_from_spread(spread, recovery_delta, 0.0, tenor);
            } catch (const SpreadTooLarge&) {
                throw SpreadTooLarge("spread at tenor " + std::to_string(tenor) +
                                     " exceeds the recovery-implied cap");
            }
            if (hazard < prev_hazard)
                throw MonotonicityViolation("implied cumulative hazard decreases at tenor " +
                                            std::to_string(tenor));
            knots_.push_back({tenor, spread, std::exp(-hazard), hazard});
            prev_tenor = tenor;
            prev_hazard = hazard;
        }
    }

    double recovery_delta() const { return recovery_delta_; }
    const std::string& as_of_date() const { return as_of_; }
    const std::vector<Knot>& knots() const { return knots_; }
    double max_tenor() const { return knots_.back().tenor; }

    void enable_flat_extrapolation(bool on = true) { flat_extrapolation_ = on; }

    /// Lambda^m(0,t); linear between knots with an implicit (0, 0) knot.
    double cumulative_hazard_at(double t) const {
        if (t < 0.0) throw CurveOutOfRange("curve queried at negative tenor");
        if (t == 0.0) return 0.0;
        double lo_t = 0.0, lo_h = 0.0;
        for (const Knot& k : knots_) {
            if (t <= k.tenor) {
                const double w = (t - lo_t) / (k.tenor - lo_t);
                return lo_h + w * (k.cum_hazard - lo_h);
            }
            lo_t = k.tenor;
            lo_h = k.cum_hazard;
        }
        if (flat_extrapolation_)
            return lo_h + last_segment_hazard() * (t - lo_t);
        throw CurveOutOfRange("tenor " + std::to_string(t) +
                              " beyond the last curve knot " + std::to_string(lo_t));
    }

    /// S^m(0,t) = exp(-Lambda^m(0,t)).
    double survival_at(double t) const { return std::exp(-cumulative_hazard_at(t)); }

    /// Forward hazard lambda^m(t): slope of the enclosing hazard segment,
    /// right-limit at knot boundaries.
    double instantaneous_hazard(double t) const {
        if (t < 0.0) throw CurveOutOfRange("curve queried at negative tenor");
        double lo_t = 0.0, lo_h = 0.0;
        for (const Knot& k : knots_) {
            if (t < k.tenor) return (k.cum_hazard - lo_h) / (k.tenor - lo_t);
            lo_t = k.tenor;
            lo_h = k.cum_hazard;
        }
        if (t == lo_t || flat_extrapolation_) return last_segment_hazard();
        throw CurveOutOfRange("tenor " + std::to_string(t) +
                              " beyond the last curve knot " + std::to_string(lo_t));
    }

private:
    double last_segment_hazard() const {
        const std::size_t n = knots_.size();
        const double lo_t = n > 1 ? knots_[n - 2].tenor : 0.0;
        const double lo_h = n > 1 ? knots_[n - 2].cum_hazard : 0.0;
        return (knots_.back().cum_hazard - lo_h) / (knots_.back().tenor - lo_t);
    }

    double recovery_delta_;
    std::string as_of_;
    std::vector<Knot> knots_;
    bool flat_extrapolation_ = false;
};

/// Parse a curve CSV with the exact header `tenor_years,spread_bp` and one
/// knot per line; spreads quoted in basis points.
inline MarketCurve ingest_spread_curve(std::istream& in, double recovery_delta,
                                       std::string as_of = {}) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty curve document");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "tenor_years,spread_bp")
        throw ParseError("curve header must be exactly 'tenor_years,spread_bp', got '" +
                         line + "'");
    std::vector<std::pair<double, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tenor_s, spread_s, extra;
        if (!std::getline(ls, tenor_s, ',') || !std::getline(ls, spread_s, ','))
            throw ParseError("curve line " + std::to_string(line_no) + " needs two columns");
        if (std::getline(ls, extra, ','))
            throw ParseError("curve line " + std::to_string(line_no) + " has extra columns");
        try {
            std::size_t used = 0;
            const double tenor = std::stod(tenor_s, &used);
            if (used != tenor_s.size()) throw std::invalid_argument(tenor_s);
            const double spread_bp = std::stod(spread_s, &used);
            if (used != spread_s.size()) throw std::invalid_argument(spread_s);
            rows.emplace_back(tenor, spread_bp * 1e-4);
        } catch (const std::logic_error&) {
            throw ParseError("curve line " + std::to_string(line_no) + " is not numeric");
        }
    }
    return MarketCurve(recovery_delta, std::move(rows), std::move(as_of));
}

inline MarketCurve ingest_spread_curve_file(const std::string& path, double recovery_delta,
                                            std::string as_of = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open curve file '" + path + "'");
    return ingest_spread_curve(in, recovery_delta, std::move(as_of));
}

}  // namespace rwcredit
