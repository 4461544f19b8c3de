#include <doctest.h>

#include <cmath>

#include "fracfold/fracops.hpp"
#include "fracfold/linalg.hpp"
#include "fracfold/singular.hpp"

using namespace fracfold;

namespace {

ProblemSpec spec_of(double s, double delta, double beta, double p = 0.0) {
    ProblemSpec spec;
    spec.s = s;
    spec.delta = delta;
    spec.beta = beta;
    spec.f = p > 0.0 ? Nonlinearity::power(p) : Nonlinearity::none();
    return spec;
}

}  // namespace

TEST_CASE("delta = 0 reduces to a linear Dirichlet problem") {
    const NonlocalOperator op(build_grid(1.0, 96), 0.5);
    ProblemSpec spec = spec_of(0.5, 0.0, 0.3);
    spec.lambda = 1.7;
    const SolutionField u = solve_pure_singular(spec, op);
    const Field exact = solve_dirichlet(op, spec.lambda * weight_field(spec, op.grid()));
    CHECK(sup_norm(u.values - exact) < 1e-9 * sup_norm(exact));
}

TEST_CASE("pure singular solution satisfies the equation") {
    const NonlocalOperator op(build_grid(1.0, 128), 0.4);
    const ProblemSpec spec = spec_of(0.4, 3.0, 0.0);
    const SolutionField u = solve_pure_singular(spec, op);
    CHECK(u.values.minCoeff() > 0.0);
    CHECK(equation_residual(op, spec, weight_field(spec, op.grid()), 1.0, u.values) < 1e-8);
}

TEST_CASE("scaling identity holds to solver tolerance") {
    const NonlocalOperator op(build_grid(1.0, 128), 0.4);
    const SolutionField u1 = solve_pure_singular(spec_of(0.4, 1.0, 0.0), op);
    ProblemSpec spec = spec_of(0.4, 1.0, 0.0);
    spec.lambda = 4.0;
    const SolutionField direct = solve_pure_singular(spec, op);
    CHECK(sup_norm(direct.values - scale_pure_singular(u1, 4.0).values) < 2e-9);
    CHECK_THROWS_AS(scale_pure_singular(u1, 0.0), std::invalid_argument);
}

TEST_CASE("regularized solutions increase as epsilon decreases") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.5);
    const ProblemSpec spec = spec_of(0.5, 0.5, 0.0);
    Field previous = Field::Zero(64);
    for (double eps : {0.5, 0.1, 0.02}) {
        const SolutionField u = solve_regularized(make_regularized(spec, op.grid(), eps), op, 1e-11);
        CHECK((u.values - previous).minCoeff() > -1e-10);
        previous = u.values;
    }
}

TEST_CASE("nonlinearity rejects bad parameters") {
    CHECK_THROWS_AS(Nonlinearity::power(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::power(2.0, -1.0), std::invalid_argument);
    const auto f = Nonlinearity::power(3.0, 2.0);
    CHECK(f.value(2.0) == doctest::Approx(16.0));
    CHECK(f.derivative(2.0) == doctest::Approx(24.0));
    CHECK(f.second_derivative(2.0) == doctest::Approx(24.0));
}

TEST_CASE("audit enforces parameter ranges") {
    CHECK_THROWS_AS(audit(spec_of(1.2, 0.5, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(audit(spec_of(0.4, 0.5, 0.9)), std::invalid_argument);
    CHECK_THROWS_AS(audit(spec_of(0.4, 0.5, 0.0), true), std::invalid_argument);
    // (1+2s)/(1-2s) = 9 at s = 0.4
    CHECK_THROWS_AS(audit(spec_of(0.4, 0.5, 0.0, 10.0), true), std::invalid_argument);
    CHECK_NOTHROW(audit(spec_of(0.4, 0.5, 0.0, 2.0), true));
}

TEST_CASE("A(lambda, 0) is the scaled pure singular solution") {
    const NonlocalOperator op(build_grid(1.0, 96), 0.4);
    const SingularProblem problem(op, spec_of(0.4, 0.5, 0.0, 2.0));
    const SolutionField u = solve_A(0.3, Field::Zero(96), problem, 1e-11);
    CHECK(sup_norm(u.values - problem.subsolution(0.3).values) < 1e-9);
}

TEST_CASE("A(lambda, h) stays in its bracket for h >= 0") {
    const NonlocalOperator op(build_grid(1.0, 96), 0.4);
    const SingularProblem problem(op, spec_of(0.4, 0.5, 0.0, 2.0));
    const Field h = Field::Constant(96, 0.7);
    const SolutionField u = solve_A(0.3, h, problem, 1e-11);
    const Field lower = problem.subsolution(0.3).values;
    CHECK((u.values - lower).minCoeff() > -1e-10);
    CHECK((lower + 0.7 * problem.torsion() - u.values).minCoeff() > -1e-10);
    CHECK(u.diagnostics.at("bracket_violation") <= 0.0);
}

TEST_CASE("minimal solution from monotone iteration and from Newton agree") {
    const NonlocalOperator op(build_grid(1.0, 96), 0.4);
    const SingularProblem problem(op, spec_of(0.4, 0.5, 0.0, 2.0));
    MinimalOptions iter{MinimalStrategy::MonotoneIteration};
    MinimalOptions newton{MinimalStrategy::MonotoneNewton};
    const SolutionField a = solve_min(0.2, problem, iter);
    const SolutionField b = solve_min(0.2, problem, newton);
    CHECK(sup_norm(a.values - b.values) < 1e-8);
    CHECK((a.values - problem.subsolution(0.2).values).minCoeff() > 0.0);
}

TEST_CASE("minimal solutions increase with lambda and vanish beyond the extremal value") {
    const NonlocalOperator op(build_grid(1.0, 96), 0.4);
    const SingularProblem problem(op, spec_of(0.4, 0.5, 0.0, 2.0));
    const SolutionField a = solve_min(0.2, problem);
    const SolutionField b = solve_min(0.4, problem);
    CHECK((b.values - a.values).minCoeff() > 0.0);
    CHECK_THROWS_AS(solve_min(2.0, problem), NoMinimalSolution);
}

TEST_CASE("monotone iteration refuses an inverted bracket") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.4);
    const SingularProblem problem(op, spec_of(0.4, 0.5, 0.0, 2.0));
    const SolutionField sub = problem.subsolution(0.2);
    SolutionField low = sub;
    low.values *= 0.5;
    CHECK_THROWS(monotone_iterate(0.2, sub, low, problem, 1e-10));
}
