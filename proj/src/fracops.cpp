#include "fracfold/fracops.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fracfold/error.hpp"
#include "fracfold/linalg.hpp"

namespace fracfold {

Grid Grid::uniform(double half_width, int n) {
    Grid g;
    g.half_width = half_width;
    g.n = n;
    g.h = 2.0 * half_width / (n + 1);
    g.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Mirror the right half so the nodes are exactly symmetric about 0.
        const int k = std::min(i + 1, n - i);
        const double x = -half_width + k * g.h;
        g.nodes[static_cast<std::size_t>(i)] = (2 * (i + 1) == n + 1) ? 0.0 : (i + 1 <= n - i) ? x : -x;
    }
    return g;
}

double Grid::distance(int i) const noexcept {
    const int k = std::min(i + 1, n - i);
    return k * h;
}

Grid build_grid(double half_width, int n) {
    if (!std::isfinite(half_width) || half_width <= 0.0) {
        throw std::invalid_argument("build_grid: half width must be finite and positive");
    }
    if (n < 8) {
        throw std::invalid_argument("build_grid: need at least 8 interior nodes, got " +
                                    std::to_string(n));
    }
    return Grid::uniform(half_width, n);
}

double normalization_constant(double s) {
    return std::pow(std::numbers::pi, -0.5) * std::pow(2.0, 2.0 * s - 1.0) * s *
           std::tgamma((1.0 + 2.0 * s) / 2.0) / std::tgamma(1.0 - s);
}

namespace {

bool is_half(double s) { return std::abs(s - 0.5) < 1e-12; }

// F'' = t^{-1-2s}; the hat integrals are second differences of F.
// Second difference F(m+1) - 2F(m) + F(m-1), written to avoid cancellation.
double second_difference(double m, double s) {
    if (is_half(s)) return -std::log1p(-1.0 / (m * m));
    const double a = 1.0 - 2.0 * s;
    const double bracket = std::expm1(a * std::log1p(1.0 / m)) + std::expm1(a * std::log1p(-1.0 / m));
    return std::pow(m, a) / (2.0 * s * (2.0 * s - 1.0)) * bracket;
}

// int_1^2 (2 - t) t^{-1-2s} dt, the far half of the neighbouring hat.
double neighbour_far_half(double s) {
    const double first = (1.0 - std::pow(2.0, -2.0 * s)) / s;
    if (is_half(s)) return first - std::log(2.0);
    const double a = 1.0 - 2.0 * s;
    return first - std::expm1(a * std::log(2.0)) / a;
}

// int_m^{m+1} (t - m) t^{-1-2s} dt, m >= 1: deficit of the boundary cell.
double boundary_cell_deficit(double m, double s) {
    const double g0 = (std::pow(m, -2.0 * s) - std::pow(m + 1.0, -2.0 * s)) / (2.0 * s);
    double g1;
    if (is_half(s)) {
        g1 = std::log1p(1.0 / m);
    } else {
        const double a = 1.0 - 2.0 * s;
        g1 = std::pow(m, a) * std::expm1(a * std::log1p(1.0 / m)) / a;
    }
    return g1 - m * g0;
}

}  // namespace

NonlocalOperator::NonlocalOperator(Grid grid, double s) : grid_(std::move(grid)), s_(s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("assemble_operator: order s must lie in (0,1)");
    }
    const int n = grid_.n;
    if (n < 1) throw std::invalid_argument("assemble_operator: empty grid");

    normalization_ = normalization_constant(s);
    const double c = 2.0 * normalization_;
    const double scale = c * std::pow(grid_.h, -2.0 * s);
    const double near = 1.0 / (2.0 - 2.0 * s);

    stencil_.assign(static_cast<std::size_t>(n), 0.0);
    stencil_[0] = scale * (1.0 / s + 2.0 * near);
    if (n > 1) stencil_[1] = -scale * (neighbour_far_half(s) + near);
    for (int m = 2; m < n; ++m) stencil_[static_cast<std::size_t>(m)] = -scale * second_difference(m, s);

    matrix_.resize(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) matrix_(i, j) = stencil_[static_cast<std::size_t>(std::abs(i - j))];
    }

    // Tail: exterior half-lines plus the part of each boundary cell not
    // covered by the interior hats (near field for the adjacent node).
    tail_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double left = i + 1.0;
        const double right = static_cast<double>(n - i);
        double t = (std::pow(left, -2.0 * s) + std::pow(right, -2.0 * s)) / (2.0 * s);
        for (const int m : {i, n - 1 - i}) {
            t += (m == 0) ? near : boundary_cell_deficit(m, s);
        }
        tail_[i] = scale * t;
    }

    const double amax = std::abs(stencil_[0]);
    const double slack = 1e-12 * amax;
    if (stencil_[0] <= 0.0) throw InvariantError("assemble_operator: nonpositive diagonal");
    for (int m = 1; m < n; ++m) {
        if (stencil_[static_cast<std::size_t>(m)] > slack) {
            throw InvariantError("assemble_operator: positive off-diagonal at offset " + std::to_string(m));
        }
    }
    for (int i = 0; i < n; ++i) {
        if (tail_[i] <= 0.0) throw InvariantError("assemble_operator: nonpositive row sum");
    }

    auto llt = std::make_shared<Eigen::LLT<Matrix>>(matrix_);
    if (llt->info() != Eigen::Success) {
        throw InvariantError("assemble_operator: Cholesky factorization failed");
    }
    llt_ = std::move(llt);
}

NonlocalOperator assemble_operator(const Grid& grid, double s) { return NonlocalOperator(grid, s); }

Field apply(const NonlocalOperator& op, const Field& u) {
    if (u.size() != op.size()) {
        throw std::invalid_argument("apply: field length " + std::to_string(u.size()) +
                                    " does not match grid size " + std::to_string(op.size()));
    }
    return op.matrix() * u;
}

Field solve_dirichlet(const NonlocalOperator& op, const Field& rhs) {
    if (rhs.size() != op.size()) throw std::invalid_argument("solve_dirichlet: dimension mismatch");
    if (!rhs.allFinite()) throw std::invalid_argument("solve_dirichlet: non-finite right-hand side");
    Field w = op.factorization().solve(rhs);
    if (!w.allFinite()) throw InvariantError("solve_dirichlet: singular factorization");
    return w;
}

std::vector<EigenPair> eigen_smallest(const NonlocalOperator& op, int count, double tol,
                                      int max_iterations) {
    if (count < 1 || count > op.size()) {
        throw std::invalid_argument("eigen_smallest: count must be in [1, n]");
    }
    return smallest_eigenpairs(op.matrix(), count, tol, max_iterations);
}

Field green_column(const NonlocalOperator& op, int j) {
    if (j < 0 || j >= op.size()) throw std::out_of_range("green_column: node index out of range");
    Field e = Field::Zero(op.size());
    e[j] = 1.0;
    return solve_dirichlet(op, e) / op.grid().h;
}

void dump_triplets(const NonlocalOperator& op, std::ostream& out) {
    const Matrix& a = op.matrix();
    char buf[96];
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j) == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, a(i, j));
            out << buf;
        }
    }
}

}  // namespace fracfold
