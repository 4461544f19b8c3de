#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fracfold/linalg.hpp"
#include "fracfold/linearization.hpp"

using namespace fracfold;

namespace {

ProblemSpec power_spec(double s, double delta, double p) {
    ProblemSpec spec;
    spec.s = s;
    spec.delta = delta;
    spec.f = Nonlinearity::power(p);
    return spec;
}

}  // namespace

TEST_CASE("linearized operator adds the expected diagonal") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.4);
    const SingularProblem problem(op, power_spec(0.4, 0.5, 2.0));
    const Field u = solve_min(0.3, problem).values;
    const LinearizedOperator lin = linearize(0.3, u, problem);
    for (int i : {0, 20, 63}) {
        const double expected = 0.3 * 0.5 * problem.k()[i] * std::pow(u[i], -1.5) - 0.3 * 2.0 * u[i];
        CHECK(lin.potential[i] == doctest::Approx(expected));
        CHECK(lin.matrix(i, i) == doctest::Approx(op.matrix()(i, i) + expected));
    }
}

TEST_CASE("principal linearized eigenvalue matches a dense solver") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.4);
    const SingularProblem problem(op, power_spec(0.4, 0.5, 2.0));
    const Field u = solve_min(0.4, problem).values;
    const SpectralReport r = lambda1(0.4, u, problem);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(linearize(0.4, u, problem).matrix);
    CHECK(r.principal.value == doctest::Approx(dense.eigenvalues()[0]).epsilon(1e-9));
    CHECK(r.second == doctest::Approx(dense.eigenvalues()[1]).epsilon(1e-8));
    CHECK(r.principal.value > 0.0);
}

TEST_CASE("Fredholm monitor is the smallest singular value") {
    const NonlocalOperator op(build_grid(1.0, 48), 0.5);
    const SingularProblem problem(op, power_spec(0.5, 1.0, 2.0));
    const double lambda = 0.3;
    const Field u = solve_min(lambda, problem).values;
    const LinearizedOperator p = linearize(lambda, u, problem, false);
    const Field fp = problem.spec().f.derivative(u);
    const Matrix t = Matrix::Identity(48, 48) - p.matrix.lu().solve(Matrix((lambda * fp).asDiagonal()));
    Eigen::JacobiSVD<Matrix> svd(t);
    CHECK(fredholm_monitor(lambda, u, problem) == doctest::Approx(svd.singularValues().minCoeff()).epsilon(1e-7));
}

TEST_CASE("first derivative solves agree with finite differences") {
    const int n = 64;
    const NonlocalOperator op(build_grid(1.0, n), 0.4);
    ProblemSpec spec = power_spec(0.4, 0.5, 2.0);
    spec.f = Nonlinearity::none();
    const SingularProblem problem(op, spec);
    Field h(n), phi(n), psi(n);
    for (int i = 0; i < n; ++i) {
        const double x = op.grid().nodes[i];
        h[i] = 1.0 + 0.5 * x;
        phi[i] = std::cos(0.5 * M_PI * x);
        psi[i] = 1.0 - x * x;
    }
    const double lambda = 2.0, t = 1e-4;
    const auto b = sensitivity_bundle(lambda, h, phi, psi, problem, 1e-13);
    CHECK(b.max_residual < 1e-9);
    auto solve = [&](double l, const Field& hh) { return solve_A(l, hh, problem, 1e-13, &b.u).values; };
    const Field w1 = (solve(lambda + t, h) - solve(lambda - t, h)) / (2 * t);
    const Field v = (solve(lambda, h + t * phi) - solve(lambda, h - t * phi)) / (2 * t);
    CHECK(sup_norm(w1 - b.w1) < 1e-6 * sup_norm(b.w1));
    CHECK(sup_norm(v - b.v) < 1e-6 * sup_norm(b.v));
    // the lambda factor on the delta(delta+1) term is visible at lambda = 2
    const auto b2 = [&](double l) { return sensitivity_bundle(l, h, phi, psi, problem, 1e-13); };
    const Field w11 = (b2(lambda + t).w1 - b2(lambda - t).w1) / (2 * t);
    CHECK(sup_norm(w11 - b.w11) < 1e-5 * sup_norm(b.w11));
}
