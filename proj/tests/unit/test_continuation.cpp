#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracfold/continuation.hpp"
#include "fracfold/io.hpp"
#include "fracfold/linalg.hpp"

using namespace fracfold;

namespace {

struct Setup {
    NonlocalOperator op{build_grid(1.0, 128), 0.4};
    SingularProblem problem{op, [] {
                                ProblemSpec spec;
                                spec.s = 0.4;
                                spec.delta = 0.5;
                                spec.f = Nonlinearity::power(2.0);
                                return spec;
                            }()};
    Branch traced = trace_minimal(problem);
    Branch rounded = fold_round(traced, problem);
};

const Setup& setup() {
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("minimal branch is stable and increasing") {
    const Branch& b = setup().traced;
    REQUIRE(b.fold.has_value());
    REQUIRE(b.points.size() > 5);
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        CHECK(b.points[i].segment == Segment::Minimal);
        CHECK(b.points[i].lambda1 > 0.0);
        if (i > 0) CHECK(b.points[i].sup_norm > b.points[i - 1].sup_norm);
    }
    CHECK(b.fold->lambda_ok <= b.fold->estimate);
    CHECK(b.fold->lambda_fail - b.fold->lambda_ok <= 2e-3 * b.fold->estimate);
}

TEST_CASE("fold is a quadratic turning point") {
    const Branch& b = setup().rounded;
    const FoldInfo& f = *b.fold;
    CHECK(f.rounded);
    CHECK(std::abs(f.slope_at_fold) < 1e-2);
    CHECK(f.quadratic_coeff < 0.0);
    CHECK(f.lambda_max == doctest::Approx(setup().traced.fold->estimate).epsilon(5e-3));
    int folds = 0;
    for (const auto& p : b.points) folds += p.fold ? 1 : 0;
    CHECK(folds == 1);
    for (const auto& p : b.points) {
        if (p.segment == Segment::Upper) CHECK(p.lambda1 < 0.0);
    }
}

TEST_CASE("two solutions below the fold, closer near it") {
    const auto& s = setup();
    const double big = s.rounded.fold->estimate;
    const auto rows = multiplicity_scan(s.rounded, s.problem, {0.5 * big, 0.9 * big});
    REQUIRE(rows[0].complete);
    REQUIRE(rows[1].complete);
    CHECK(rows[0].distinct);
    CHECK(rows[0].gap > rows[1].gap);
    CHECK(rows[0].second->sup() > rows[0].minimal.sup());
}

TEST_CASE("upper segment escapes to infinity as lambda goes to zero") {
    const auto report = asymptotic_bifurcation_probe(setup().rounded, 1e3);
    CHECK(report.reached_cap);
    CHECK(report.sup_growth >= 10.0);
    CHECK(report.lambda_shrink >= 10.0);
    // u ~ lambda^{-1/(p-1)} on the tail
    CHECK(report.tail_exponent == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("small lambda uniqueness probe") {
    const auto& s = setup();
    const auto r = uniqueness_probe(1e-3 * s.traced.fold->estimate, s.problem, 10, 7);
    CHECK(r.verdict == UniquenessVerdict::Unique);
    CHECK(r.converged_to_minimal > 0);
    CHECK(r.seed == 7);
    CHECK(uniqueness_threshold(s.problem) > 0.0);
}

TEST_CASE("branch exports") {
    const Branch& b = setup().rounded;
    const std::string csv = branch_csv(b);
    CHECK(csv.rfind("lambda,sup_norm,lambda1,monitor,arclength,residual", 0) == 0);
    // the bifurcation diagram column rises to the fold and falls after it
    std::istringstream in(bifurcation_data(b));
    std::vector<double> lambdas;
    std::string header;
    std::getline(in, header);
    CHECK(header[0] == '#');
    double l, u;
    while (in >> l >> u) lambdas.push_back(l);
    const auto top = std::max_element(lambdas.begin(), lambdas.end()) - lambdas.begin();
    CHECK(top > 0);
    CHECK(top < static_cast<long>(lambdas.size()) - 1);
    CHECK_THROWS_AS(bifurcation_data(Branch{}), std::invalid_argument);
}
