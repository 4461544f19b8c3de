#include "fracfold/linearization.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracfold/linalg.hpp"

namespace fracfold {

namespace {

Field singular_potential(double lambda, const Field& u, const SingularProblem& problem) {
    const double delta = problem.spec().delta;
    Field pot(u.size());
    for (int i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0)) throw std::invalid_argument("linearization needs a positive field");
        pot[i] = lambda * delta * problem.k()[i] * std::pow(u[i], -delta - 1.0);
    }
    return pot;
}

Eigen::LLT<Matrix> factor_p(double lambda, const Field& u, const SingularProblem& problem) {
    Matrix p = problem.op().matrix();
    p.diagonal() += singular_potential(lambda, u, problem);
    Eigen::LLT<Matrix> llt(p);
    if (llt.info() != Eigen::Success) throw InvariantError("P = A + singular potential is not positive definite");
    return llt;
}

}  // namespace

LinearizedOperator linearize(double lambda, const Field& u, const SingularProblem& problem, bool include_f) {
    if (u.size() != problem.op().size()) throw std::invalid_argument("linearize: dimension mismatch");
    LinearizedOperator lin;
    lin.base = &problem.op();
    lin.potential = singular_potential(lambda, u, problem);
    if (include_f) lin.potential -= lambda * problem.spec().f.derivative(u);
    if (!lin.potential.allFinite()) throw InvariantError("linearize: potential is not finite");
    lin.matrix = problem.op().matrix();
    lin.matrix.diagonal() += lin.potential;
    return lin;
}

SpectralReport lambda1(double lambda, const Field& u, const SingularProblem& problem) {
    const auto lin = linearize(lambda, u, problem);
    const auto& set = problem.settings();
    auto pairs = smallest_eigenpairs(lin.matrix, 2, set.eigen_tol, set.eigen_cap);
    SpectralReport r;
    r.principal = pairs[0];
    r.second = pairs[1].value;
    r.relative_gap = (pairs[1].value - pairs[0].value) / std::abs(pairs[0].value);
    return r;
}

Field d2A_directional(double lambda, const Field& u, const Field& phi, const SingularProblem& problem) {
    if (phi.size() != u.size()) throw std::invalid_argument("d2A_directional: dimension mismatch");
    return factor_p(lambda, u, problem).solve(phi);
}

SensitivityBundle sensitivity_bundle(double lambda, const Field& h, const Field& phi, const Field& psi,
                                     const SingularProblem& problem, double tol) {
    const int n = problem.op().size();
    if (h.size() != n || phi.size() != n || psi.size() != n) {
        throw std::invalid_argument("sensitivity_bundle: dimension mismatch");
    }
    SensitivityBundle b;
    b.u = solve_A(lambda, h, problem, tol).values;
    const auto llt = factor_p(lambda, b.u, problem);
    const double delta = problem.spec().delta;
    const Field& k = problem.k();
    const Field& u = b.u;

    const Field um = u.array().pow(-delta);
    const Field um1 = u.array().pow(-delta - 1.0);
    const Field um2 = u.array().pow(-delta - 2.0);
    const double c2 = lambda * delta * (delta + 1.0);

    b.w1 = llt.solve(Field(k.cwiseProduct(um)));
    b.v = llt.solve(phi);
    b.v_psi = llt.solve(psi);
    const Field r11 = c2 * k.cwiseProduct(um2).cwiseProduct(b.w1.cwiseAbs2()) -
                      2.0 * delta * k.cwiseProduct(um1).cwiseProduct(b.w1);
    const Field r12 = c2 * k.cwiseProduct(um2).cwiseProduct(b.w1).cwiseProduct(b.v) -
                      delta * k.cwiseProduct(um1).cwiseProduct(b.v);
    const Field r22 = c2 * k.cwiseProduct(um2).cwiseProduct(b.v).cwiseProduct(b.v_psi);
    b.w11 = llt.solve(r11);
    b.w12 = llt.solve(r12);
    b.w22 = llt.solve(r22);

    Matrix p = problem.op().matrix();
    p.diagonal() += singular_potential(lambda, u, problem);
    auto res = [&](const Field& x, const Field& rhs) { return sup_norm(p * x - rhs); };
    b.max_residual = std::max({res(b.w1, k.cwiseProduct(um)), res(b.v, phi), res(b.v_psi, psi),
                               res(b.w11, r11), res(b.w12, r12), res(b.w22, r22)});
    return b;
}

double fredholm_monitor(double lambda, const Field& u, const SingularProblem& problem, double tol,
                        int max_iterations) {
    // I - P^{-1} D = P^{-1} J, so its smallest singular value is 1 / |J^{-1} P|_2.
    Matrix p = problem.op().matrix();
    p.diagonal() += singular_potential(lambda, u, problem);
    Matrix j = p;
    j.diagonal() -= lambda * problem.spec().f.derivative(u);
    Eigen::PartialPivLU<Matrix> lu(j);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15)) return 0.0;

    // Power iteration for the top eigenvalue of (J^{-1}P)^T (J^{-1}P) = P J^{-1} J^{-1} P.
    // A symmetric start would never see antisymmetric modes; use a fixed pseudo-random one.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> coin(-1.0, 1.0);
    Field x(u.size());
    for (int i = 0; i < x.size(); ++i) x[i] = coin(rng);
    x.normalize();
    double sigma2 = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        Field y = lu.solve(Field(p * x));
        Field z = p * lu.solve(y);
        const double next = z.norm();
        if (!std::isfinite(next) || next == 0.0) return 0.0;
        x = z / next;
        if (std::abs(next - sigma2) <= tol * next) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    return 1.0 / std::sqrt(sigma2);
}

}  // namespace fracfold
