#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rwcredit/cirpp.hpp"
#include "test_support.hpp"

using namespace rwcredit;

namespace {

const CirParams kBase{0.5138, 0.01497, 0.08904, 0.04348, 0.4};

// direct long-double evaluation of the printed bond-factor formulas
std::pair<double, double> bond_factors_reference(const CirParams& p, double tau) {
    const long double kappa = p.kappa, sigma = p.sigma, theta = p.theta;
    const long double h = std::sqrt(kappa * kappa + 2.0L * sigma * sigma);
    const long double em1 = std::expm1(h * tau);
    const long double denom = 2.0L * h + (kappa + h) * em1;
    const long double a = std::pow(2.0L * h * std::exp(0.5L * (kappa + h) * tau) / denom,
                                   2.0L * kappa * theta / (sigma * sigma));
    const long double b = 2.0L * em1 / denom;
    return {static_cast<double>(a), static_cast<double>(b)};
}

}  // namespace

TEST_CASE("bond factors") {
    SECTION("empty interval collapses") {
        const BondFactors f = bond_factors(kBase, 2.0, 2.0);
        CHECK(f.a_factor == 1.0);
        CHECK(f.b_factor == 0.0);
    }
    SECTION("five-year factors match the direct formula") {
        const BondFactors f = bond_factors(kBase, 0.0, 5.0);
        const auto [a_ref, b_ref] = bond_factors_reference(kBase, 5.0);
        CHECK(f.h == Catch::Approx(std::sqrt(kBase.kappa * kBase.kappa +
                                             2.0 * kBase.sigma * kBase.sigma))
                         .epsilon(1e-15));
        CHECK(f.b_factor == Catch::Approx(1.7796).margin(1e-3));
        CHECK(f.a_factor == Catch::Approx(a_ref).epsilon(1e-12));
        CHECK(f.b_factor == Catch::Approx(b_ref).epsilon(1e-12));
    }
    SECTION("factors depend only on the gap") {
        const BondFactors f1 = bond_factors(kBase, 1.0, 6.0);
        const BondFactors f2 = bond_factors(kBase, 0.0, 5.0);
        CHECK(f1.a_factor == f2.a_factor);
        CHECK(f1.b_factor == f2.b_factor);
    }
    SECTION("long tenors stay finite") {
        const BondFactors f = bond_factors(kBase, 0.0, 800.0);
        CHECK(std::isfinite(f.a_factor));
        CHECK(f.a_factor >= 0.0);
        CHECK(f.b_factor == Catch::Approx(2.0 / (kBase.kappa + kBase.h())).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bond_factors(kBase, 2.0, 1.0), BadInterval);
}

TEST_CASE("log-derivative functions D and E") {
    SECTION("values at zero") {
        const auto [d0, e0] = d_e_functions(kBase, 0.0);
        CHECK(d0 == Catch::Approx(0.0).margin(1e-15));
        CHECK(e0 == Catch::Approx(1.0).epsilon(1e-15));
    }
    SECTION("closed forms match central differences") {
        // probes sit where the derivative is large enough for the finite
        // difference itself to carry 1e-7 relative accuracy
        const double h_fd = 1e-5;
        for (double t : {0.5, 1.0, 3.0, 7.0, 20.0}) {
            const auto [d_val, e_val] = d_e_functions(kBase, t);
            const double d_fd =
                (log_bond_a(kBase, t + h_fd) - log_bond_a(kBase, t - h_fd)) / (2.0 * h_fd);
            CHECK(d_val == Catch::Approx(d_fd).epsilon(1e-7));
        }
        for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double e_val = d_e_functions(kBase, t).second;
            const double e_fd =
                (bond_b(kBase, t + h_fd) - bond_b(kBase, t - h_fd)) / (2.0 * h_fd);
            CHECK(e_val == Catch::Approx(e_fd).epsilon(1e-7));
        }
    }
    SECTION("E decays to zero") {
        const double e5 = d_e_functions(kBase, 5.0).second;
        const double e10 = d_e_functions(kBase, 10.0).second;
        const double e50 = d_e_functions(kBase, 50.0).second;
        CHECK(e10 < e5);
        CHECK(e50 < e10);
        CHECK(e50 < 1e-9);
    }
}

TEST_CASE("spread and hazard conversions") {
    const double delta = 0.4;
    SECTION("published five-year pairs") {
        CHECK(hazard_from_spread(113e-4, delta, 0.0, 5.0) == Catch::Approx(0.096).margin(5e-4));
        CHECK(hazard_from_spread(109e-4, delta, 0.0, 5.0) == Catch::Approx(0.093).margin(5e-4));
        CHECK(hazard_from_spread(0.0, delta, 0.0, 5.0) == 0.0);
        CHECK(spread_from_hazard(0.0, delta, 0.0, 5.0) == 0.0);
        CHECK(spread_from_hazard(0.096, delta, 0.0, 5.0) * 1e4 ==
              Catch::Approx(113.0).margin(0.5));
    }
    SECTION("round trip on the valid range") {
        const double cap = -std::log(delta) / 5.0;
        for (int i = 1; i < 40; ++i) {
            const double sp = cap * i / 40.5;
            const double back =
                spread_from_hazard(hazard_from_spread(sp, delta, 0.0, 5.0), delta, 0.0, 5.0);
            CHECK(back == Catch::Approx(sp).margin(1e-12));
        }
    }
    SECTION("monotonicity in the hazard") {
        double prev = -1.0;
        for (double lam : {0.0, 0.05, 0.1, 0.5, 1.0, 3.0}) {
            const double sp = spread_from_hazard(lam, delta, 0.0, 5.0);
            CHECK(sp > prev);
            CHECK(sp < -std::log(delta) / 5.0);
            prev = sp;
        }
    }
    SECTION("cap enforcement") {
        CHECK_THROWS_AS(hazard_from_spread(0.19, delta, 0.0, 5.0), SpreadTooLarge);
        // a ten-year gap admits spreads up to roughly 900 bp
        CHECK_NOTHROW(hazard_from_spread(900e-4, delta, 0.0, 10.0));
        CHECK_THROWS_AS(hazard_from_spread(930e-4, delta, 0.0, 10.0), SpreadTooLarge);
        CHECK_THROWS_AS(spread_from_hazard(0.1, delta, 1.0, 1.0), BadInterval);
    }
}

TEST_CASE("exponential moment of the inverse-factor integral") {
    SECTION("zero exponent returns one exactly") {
        CHECK(laplace_exponential_inverse_integral(kBase, 0.0, 1.0) == 1.0);
    }
    SECTION("series route agrees with the identity anchor") {
        CHECK(laplace_exponential_inverse_integral(kBase, 1e-12, 1.0) ==
              Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("convergence boundary") {
        const double s2 = kBase.sigma * kBase.sigma;
        const double boundary =
            -std::pow(kBase.kappa * kBase.theta - 0.5 * s2, 2) / (2.0 * s2);
        CHECK(boundary == Catch::Approx(-8.76e-4).margin(1e-6));
        CHECK_THROWS_AS(laplace_exponential_inverse_integral(kBase, -1e-3, 1.0),
                        OutsideDomain);
        CHECK_THROWS_AS(laplace_exponential_inverse_integral(kBase, boundary, 1.0),
                        OutsideDomain);
        CHECK_NOTHROW(laplace_exponential_inverse_integral(kBase, -8.5e-4, 1.0));
        // no finite exponential moment beyond the mirrored tail rate
        CHECK_THROWS_AS(laplace_exponential_inverse_integral(kBase, -boundary, 1.0),
                        OutsideDomain);
        CHECK_THROWS_AS(laplace_exponential_inverse_integral(kBase, 5e-3, 1.0),
                        OutsideDomain);
        CHECK_NOTHROW(laplace_exponential_inverse_integral(kBase, 8.5e-4, 1.0));
    }
    SECTION("monotone increasing in the exponent") {
        double prev = 0.0;
        for (double mu : {-8e-4, -4e-4, -1e-4, 1e-4, 4e-4, 8e-4}) {
            const double val = laplace_exponential_inverse_integral(kBase, mu, 1.0);
            CHECK(val > prev);
            prev = val;
        }
    }
    SECTION("matches a Monte Carlo estimate") {
        const double mu = -4e-4;
        const auto integrals = rwtest::inverse_integral_samples(kBase, 1.0, 520, 20000, 77);
        std::vector<double> transformed(integrals.size());
        for (std::size_t i = 0; i < integrals.size(); ++i)
            transformed[i] = std::exp(mu * integrals[i]);
        const auto [mc_mean, mc_se] = rwtest::mean_se(transformed);
        const double closed = laplace_exponential_inverse_integral(kBase, mu, 1.0);
        CHECK(std::fabs(closed - mc_mean) <= 3.0 * mc_se);
    }
}

TEST_CASE("measure-change exponent audit") {
    SECTION("published parameter set") {
        const NovikovReport r = novikov_check(kBase);
        CHECK(r.gamma == Catch::Approx(0.06412).margin(1e-4));
        CHECK(r.exponent_mu == Catch::Approx(8.22e-3).margin(1e-4));
        CHECK(r.domain_boundary == Catch::Approx(-8.76e-4).margin(1e-6));
        CHECK(r.passes);
    }
    SECTION("any admissible parameter set passes") {
        for (const CirParams p : {CirParams{0.2, 0.05, 0.1, 0.02, 0.4},
                                  CirParams{1.5, 0.01, 0.09, 0.08, 0.0},
                                  CirParams{0.8, 0.03, 0.15, 0.001, 0.7}}) {
            CHECK(novikov_check(p).passes);
        }
    }
    SECTION("degenerate level kappa theta = sigma^2/2") {
        // dyadic parameters make the equality exact: the boundary collapses
        // to zero while gamma stays positive
        const CirParams p{0.5, 0.015625, 0.125, 0.02, 0.4};
        const NovikovReport r = novikov_check(p);
        CHECK(r.domain_boundary == 0.0);
        CHECK(r.gamma == Catch::Approx(0.03125).epsilon(1e-12));
        CHECK(r.passes);
    }
    SECTION("alternative coefficient convention") {
        const NovikovReport r = novikov_check(kBase, GammaConvention::plus_quarter_sigma2);
        const double expected =
            (kBase.kappa * kBase.theta + 0.25 * kBase.sigma * kBase.sigma) / kBase.sigma;
        CHECK(r.gamma == Catch::Approx(expected).epsilon(1e-12));
        CHECK(r.passes);
    }
}
