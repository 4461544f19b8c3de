#include "fracfold/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "fracfold/error.hpp"

namespace fracfold {

double sup_norm(const Field& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double gershgorin_lower_bound(const Matrix& m) {
    double lower = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m.rows(); ++i) {
        const double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
        lower = std::min(lower, m(i, i) - off);
    }
    return lower;
}

namespace {

struct ShiftedSolver {
    double shift = 0.0;
    Eigen::PartialPivLU<Matrix> lu;
};

// Number of eigenvalues of m below sigma, from the inertia of an LDL^T factorization.
int count_below(const Matrix& m, double sigma) {
    Eigen::LDLT<Matrix> ldlt(m - sigma * Matrix::Identity(m.rows(), m.cols()));
    if (ldlt.info() != Eigen::Success) return -1;
    return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
}

// Inverse iteration for one eigenpair orthogonal to `locked`. A re-shift is accepted
// only if exactly locked.size() eigenvalues lie below it, so the shift never passes the target.
EigenPair inverse_iteration(const Matrix& m, const std::vector<Field>& locked, double base_shift,
                            double tol, int max_iterations) {
    const int n = static_cast<int>(m.rows());
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    // Large diagonal potentials put the attainable residual above an absolute tolerance.
    const double target = std::max(tol, 256.0 * std::numeric_limits<double>::epsilon() * scale);

    ShiftedSolver solver;
    solver.shift = base_shift;
    solver.lu.compute(m - base_shift * Matrix::Identity(n, n));

    auto deflate = [&](Field& v) {
        for (const Field& q : locked) v -= q.dot(v) * q;
    };

    Field v = Field::Ones(n);
    // Break symmetry for deflated pairs so the start is not orthogonal to the target.
    if (!locked.empty()) {
        for (int i = 0; i < n; ++i) v[i] += 0.5 * std::sin(1.0 + 2.3 * i * (1 + static_cast<int>(locked.size())));
    }
    deflate(v);
    v.normalize();

    EigenPair out;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iterations; ++it) {
        Field y = solver.lu.solve(v);
        deflate(y);
        const double norm = y.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            // The shift hit an eigenvalue exactly; nudge it down.
            solver.shift -= 1e-8 * scale;
            solver.lu.compute(m - solver.shift * Matrix::Identity(n, n));
            continue;
        }
        v = y / norm;
        const Field mv = m * v;
        const double rq = v.dot(mv);
        const Field r = mv - rq * v;
        const double vinf = sup_norm(v);
        residual = sup_norm(r) / vinf;
        out.value = rq;
        out.iterations = it;
        if (residual <= target) break;

        // Move the shift up once |rq - mu| <= ||r||_2 guarantees it stays below.
        if (it % 4 == 0) {
            const double candidate = rq - 2.0 * r.norm() - 1e-10 * scale;
            if (candidate > solver.shift + 1e-6 * std::abs(rq - solver.shift)) {
                if (count_below(m, candidate) == static_cast<int>(locked.size())) {
                    solver.shift = candidate;
                    solver.lu.compute(m - candidate * Matrix::Identity(n, n));
                }
            }
        }
    }
    out.residual = residual;
    if (residual > target) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "eigen: inverse iteration did not reach tolerance (residual %.3g, value %.6g)",
                      residual, out.value);
        throw ConvergenceError(buf, residual, out.iterations);
    }
    out.vector = v;
    return out;
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const Matrix& m, int count, double tol, int max_iterations) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw std::invalid_argument("smallest_eigenpairs: matrix must be square");
    if (count < 1 || count > n) throw std::invalid_argument("smallest_eigenpairs: count must be in [1, n]");

    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double base_shift = gershgorin_lower_bound(m) - 1e-6 * scale;

    std::vector<Field> locked;
    std::vector<EigenPair> pairs;
    for (int k = 0; k < count; ++k) {
        EigenPair p = inverse_iteration(m, locked, base_shift, tol, max_iterations);
        locked.push_back(p.vector / p.vector.norm());
        const double s = sup_norm(p.vector);
        p.vector /= s;
        if (p.vector.sum() < 0.0) p.vector = -p.vector;
        p.residual = sup_norm(m * p.vector - p.value * p.vector);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace fracfold
