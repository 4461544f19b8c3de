#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fracfold/fracops.hpp"
#include "fracfold/linalg.hpp"

using namespace fracfold;

namespace {

// tanh-sinh on [a, b]; f may be singular at either end.
double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    const double h = 1.0 / 64.0;
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = -256; k <= 256; ++k) {
        const double t = k * h;
        const double u = 0.5 * M_PI * std::sinh(t);
        const double x = std::tanh(u);
        const double w = 0.5 * M_PI * std::cosh(t) / (std::cosh(u) * std::cosh(u));
        // distance to the nearer end, computed without cancellation
        const double gap = half / (std::exp(std::abs(u)) * std::cosh(u));
        if (!(gap > 0.0)) continue;
        const double y = x < 0 ? a + gap : b - gap;
        sum += w * f(y);
    }
    return sum * half * h;
}

// c_{1,s} P.V. int (w(x0) - w(y)) |x0 - y|^{-1-2s} dy for w = (1 - x^2)_+^s,
// written as an integral over y > 0 of the symmetric second difference.
double getoor_by_quadrature(double s, double x0) {
    auto w = [s](double x) { return std::abs(x) < 1.0 ? std::pow(1.0 - x * x, s) : 0.0; };
    const double w0 = w(x0);
    const double d2 = -2.0 * s * std::pow(1.0 - x0 * x0, s - 1.0) +
                      4.0 * s * (s - 1.0) * x0 * x0 * std::pow(1.0 - x0 * x0, s - 2.0);
    auto integrand = [&](double y) {
        if (y < 1e-5) return -d2 * std::pow(y, 1.0 - 2.0 * s);
        return (2.0 * w0 - w(x0 + y) - w(x0 - y)) / std::pow(y, 1.0 + 2.0 * s);
    };
    const double a = 1.0 - x0, b = 1.0 + x0;
    double total = tanh_sinh(integrand, 0.0, a) + tanh_sinh(integrand, a, b);
    total += 2.0 * w0 * std::pow(b, -2.0 * s) / (2.0 * s);  // both neighbours outside
    return 2.0 * normalization_constant(s) * total;
}

}  // namespace

TEST_CASE("Getoor constant agrees with quadrature of the singular integral") {
    for (double s : {0.25, 0.5, 0.75}) {
        for (double x0 : {0.0, 0.3, 0.7}) {
            CAPTURE(s);
            CAPTURE(x0);
            CHECK(getoor_by_quadrature(s, x0) == doctest::Approx(std::tgamma(2.0 * s + 1.0)).epsilon(1e-6));
        }
    }
}

TEST_CASE("torsion function approaches the Getoor profile") {
    for (double s : {0.5, 0.75}) {
        double previous = 1e9;
        for (int n : {64, 128, 256}) {
            const NonlocalOperator op(build_grid(1.0, n), s);
            const Field w = solve_dirichlet(op, Field::Ones(n));
            double err = 0.0;
            for (int i = 0; i < n; ++i) {
                const double x = op.grid().nodes[i];
                err = std::max(err, std::abs(w[i] - std::pow(1 - x * x, s) / std::tgamma(2 * s + 1)));
            }
            CHECK(err < previous);
            previous = err;
        }
        CHECK(previous < 0.03);
    }
}

TEST_CASE("matrix is a symmetric Toeplitz M-matrix with positive row sums") {
    const NonlocalOperator op(build_grid(2.0, 40), 0.3);
    const Matrix& a = op.matrix();
    for (int i = 0; i < 40; ++i) {
        CHECK(a(i, i) > 0.0);
        CHECK(a.row(i).sum() > 0.0);
        for (int j = 0; j < 40; ++j) {
            if (i != j) CHECK(a(i, j) < 0.0);
            CHECK(a(i, j) == doctest::Approx(a(j, i)));
            CHECK(a(i, j) == doctest::Approx(op.stencil()[std::abs(i - j)]));
        }
    }
    CHECK((op.tail() - a.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-9 * a(0, 0));
}

TEST_CASE("apply and solve are inverse to each other") {
    const NonlocalOperator op(build_grid(1.0, 50), 0.6);
    Field u(50);
    for (int i = 0; i < 50; ++i) u[i] = std::sin(0.3 * i) + 2.0;
    CHECK(sup_norm(apply(op, u) - op.matrix() * u) < 1e-12 * sup_norm(op.matrix() * u));
    CHECK(sup_norm(solve_dirichlet(op, apply(op, u)) - u) < 1e-10);
}

TEST_CASE("positive data give positive solutions") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.25);
    Field rhs = Field::Zero(64);
    rhs[5] = 1.0;
    CHECK(solve_dirichlet(op, rhs).minCoeff() > 0.0);
}

TEST_CASE("smallest eigenpairs match a dense symmetric solver") {
    const NonlocalOperator op(build_grid(1.0, 80), 0.4);
    const auto pairs = eigen_smallest(op, 3);
    Eigen::SelfAdjointEigenSolver<Matrix> dense(op.matrix());
    for (int k = 0; k < 3; ++k) {
        CHECK(pairs[k].value == doctest::Approx(dense.eigenvalues()[k]).epsilon(1e-9));
        CHECK(pairs[k].vector.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    }
    CHECK(pairs[0].vector.minCoeff() > 0.0);
}

TEST_CASE("Green function is symmetric and positive") {
    const NonlocalOperator op(build_grid(1.0, 30), 0.5);
    const Field g3 = green_column(op, 3), g17 = green_column(op, 17);
    CHECK(g3[17] == doctest::Approx(g17[3]));
    CHECK(g3.minCoeff() > 0.0);
}

TEST_CASE("grid checks") {
    CHECK_THROWS_AS(build_grid(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 32), std::invalid_argument);
    const Grid g = build_grid(1.5, 9);
    CHECK(g.h == doctest::Approx(0.3));
    CHECK(g.nodes.front() == doctest::Approx(-1.2));
    CHECK(g.distance(0) == doctest::Approx(0.3));
    CHECK(g.distance(4) == doctest::Approx(1.5));
}

TEST_CASE("triplet dump lists every nonzero once") {
    const NonlocalOperator op(build_grid(1.0, 10), 0.5);
    std::ostringstream out;
    dump_triplets(op, out);
    std::istringstream in(out.str());
    int i, j, count = 0;
    double v;
    while (in >> i >> j >> v) {
        CHECK(v == doctest::Approx(op.matrix()(i, j)));
        ++count;
    }
    CHECK(count == 100);
}
