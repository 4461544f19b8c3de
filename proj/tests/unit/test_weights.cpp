#include <doctest.h>

#include <cmath>

#include "fracfold/fracops.hpp"
#include "fracfold/problem.hpp"
#include "fracfold/weights.hpp"

using namespace fracfold;

TEST_CASE("regime classification follows beta/s + delta against 1") {
    CHECK(classify_regime(0.4, 0.5, 0.0) == Regime::Sub);
    CHECK(classify_regime(0.5, 1.0, 0.0) == Regime::Critical);
    CHECK(classify_regime(0.4, 3.0, 0.0) == Regime::Super);
    CHECK(classify_regime(0.5, 0.5, 0.25) == Regime::Critical);
    CHECK(predicted_exponent(0.4, 0.5, 0.0) == doctest::Approx(0.4));
    CHECK(predicted_exponent(0.4, 3.0, 0.0) == doctest::Approx(0.2));
    CHECK(predicted_exponent(0.75, 2.0, 0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("exponent fit recovers a pure power of the distance") {
    const Grid g = build_grid(1.0, 512);
    const Field d = distance_field(g);
    for (double a : {0.2, 0.3, 0.75}) {
        const ExponentFit fit = fit_boundary_exponent(d.array().pow(a).matrix(), g);
        CHECK(fit.alpha == doctest::Approx(a).epsilon(1e-10));
        CHECK(fit.r2 == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(fit_boundary_exponent(d, build_grid(1.0, 16)), std::invalid_argument);
}

TEST_CASE("exponent fit on a perturbed power stays between the two exponents") {
    const Grid g = build_grid(1.0, 1024);
    const Field d = distance_field(g);
    const Field u = (d.array().pow(0.2) * (1.0 + d.array())).matrix();
    const double alpha = fit_boundary_exponent(u, g).alpha;
    CHECK(alpha >= 0.2);
    CHECK(alpha <= 0.25);
}

TEST_CASE("weight K rejects beta at or above 2s") {
    const Grid g = build_grid(1.0, 32);
    CHECK_THROWS_AS(weight_k(g, 0.8, 1.0, 0.4), std::invalid_argument);
    const Field k = weight_k(g, 0.5, 2.0, 0.4);
    CHECK(k[0] == doctest::Approx(2.0 * std::pow(g.distance(0), -0.5)));
}

TEST_CASE("weight profile matches the regime formula") {
    const Grid g = build_grid(1.0, 64);
    Field phi = distance_field(g).array().pow(0.4).matrix();
    phi /= phi.maxCoeff();
    const auto sup = build_weight_profile(phi, 0.4, 3.0, 0.0);
    CHECK(sup.regime == Regime::Super);
    CHECK(sup.values[3] == doctest::Approx(std::pow(phi[3], 0.5)));
    const auto sub = build_weight_profile(phi, 0.4, 0.5, 0.0);
    CHECK(sub.values[3] == doctest::Approx(phi[3]));
    CHECK_THROWS_AS(build_weight_profile(2.0 * phi, 0.4, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("Holder seminorm") {
    const Grid g = build_grid(1.0, 256);
    const Field d = distance_field(g);
    const Field u = d.array().pow(0.5).matrix();
    // d^{1/2} is exactly 1/2-Holder; at a larger exponent the quotient blows up near the ends.
    CHECK(holder_seminorm(u, g, 0.5) == doctest::Approx(1.0).epsilon(0.05));
    const Grid fine = build_grid(1.0, 1024);
    const Field uf = distance_field(fine).array().pow(0.5).matrix();
    CHECK(holder_seminorm(uf, fine, 0.7) > 1.2 * holder_seminorm(u, g, 0.7));
    CHECK_THROWS_AS(holder_seminorm(u, g, 1.5), std::invalid_argument);
}

TEST_CASE("H^s mass indicator on synthetic profiles") {
    ProblemSpec spec;
    spec.s = 0.75;
    spec.delta = 2.0;
    spec.beta = 0.0;
    std::vector<std::pair<Grid, Field>> finite, diverging;
    for (int n : {255, 511, 1023}) {
        const Grid g = build_grid(1.0, n);
        const Field d = distance_field(g);
        // K u^{1-delta} = d^{-0.5} is integrable, d^{-1.5} is not
        finite.emplace_back(g, d.array().pow(0.5).matrix());
        diverging.emplace_back(g, d.array().pow(1.5).matrix());
    }
    CHECK(hs_membership_indicator(finite, spec).verdict == MassVerdict::Finite);
    CHECK(hs_membership_indicator(diverging, spec).verdict == MassVerdict::Diverging);
    finite.pop_back();
    CHECK_THROWS_AS(hs_membership_indicator(finite, spec), std::invalid_argument);
}

TEST_CASE("H^s flag is the algebraic inequality") {
    ProblemSpec spec;
    spec.s = 0.75;
    spec.delta = 3.0;
    CHECK(spec.hs_flag());
    spec.delta = 2.0;
    spec.beta = 1.4;
    CHECK_FALSE(spec.hs_flag());
}
