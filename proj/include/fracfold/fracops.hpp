#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace fracfold {

using Field = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform interior grid on the symmetric interval (-L, L).
struct Grid {
    double half_width = 1.0;
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes;

    /// Unchecked uniform partition with n interior nodes, h = 2L/(n+1).
    static Grid uniform(double half_width, int n);

    int size() const noexcept { return n; }
    /// Distance of node i to the nearer endpoint.
    double distance(int i) const noexcept;
};

/// Grid with the coarseness and finiteness checks applied (n >= 8).
Grid build_grid(double half_width, int n);

/// C(1,s) = pi^{-1/2} 2^{2s-1} s Gamma((1+2s)/2) / Gamma(1-s).
double normalization_constant(double s);

/// Dense symmetric discretization of the restricted fractional Laplacian
/// (integral definition, u = 0 outside the interval).
///
/// Row i approximates 2C(1,s) P.V. int (u(x_i) - u(y)) |x_i - y|^{-1-2s} dy.
/// On [x_i - h, x_i + h] u is replaced by its quadratic interpolant through
/// the three neighbouring nodes, elsewhere by the piecewise-linear (hat)
/// interpolant, and the exterior contribution is integrated in closed form.
/// The matrix is Toeplitz, an M-matrix, and has positive row sums.
class NonlocalOperator {
public:
    NonlocalOperator(Grid grid, double s);

    const Grid& grid() const noexcept { return grid_; }
    double order() const noexcept { return s_; }
    double normalization() const noexcept { return normalization_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    int size() const noexcept { return grid_.n; }

    /// First row of the Toeplitz matrix, entry m = A_{i,i+m}.
    const std::vector<double>& stencil() const noexcept { return stencil_; }

    /// Analytic tail coefficient per row: value of A applied to the constant 1.
    const Field& tail() const noexcept { return tail_; }

    /// Cholesky factor of the matrix, computed once at construction.
    const Eigen::LLT<Matrix>& factorization() const noexcept { return *llt_; }

private:
    Grid grid_;
    double s_;
    double normalization_;
    std::vector<double> stencil_;
    Matrix matrix_;
    Field tail_;
    std::shared_ptr<const Eigen::LLT<Matrix>> llt_;
};

struct EigenPair {
    double value = 0.0;
    Field vector;  // sup-normalized
    double residual = 0.0;
    int iterations = 0;
};

NonlocalOperator assemble_operator(const Grid& grid, double s);

Field apply(const NonlocalOperator& op, const Field& u);

/// Solves A w = rhs. For rhs >= 0, rhs != 0 the result is positive.
Field solve_dirichlet(const NonlocalOperator& op, const Field& rhs);

/// k smallest eigenpairs in increasing order (eigen_tol on the sup-norm residual).
std::vector<EigenPair> eigen_smallest(const NonlocalOperator& op, int count,
                                      double tol = 1e-8, int max_iterations = 500);

/// Discrete Green function x_i -> G(x_i, x_j): column j of A^{-1} divided by h.
Field green_column(const NonlocalOperator& op, int j);

/// Plain-text triplets "i j value", one nonzero per line, 0-based indices.
void dump_triplets(const NonlocalOperator& op, std::ostream& out);

}  // namespace fracfold
