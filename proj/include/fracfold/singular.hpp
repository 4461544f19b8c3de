#pragma once

#include <map>
#include <optional>
#include <string>

#include "fracfold/error.hpp"
#include "fracfold/fracops.hpp"
#include "fracfold/problem.hpp"
#include "fracfold/weights.hpp"

namespace fracfold {

/// Raised when no minimal solution can be produced at the requested lambda.
/// Used by the continuation code as a fold probe (lambda likely above the extremal value).
class NoMinimalSolution : public Error {
public:
    using Error::Error;
};

struct EpsilonSchedule {
    double initial = 1.0;
    double ratio = 0.5;
    double stop = 1e-6;  // sup-norm gap between successive levels
    int max_levels = 60;
};

struct SolverSettings {
    double newton_tol = 1e-9;
    int newton_cap = 200;
    double eigen_tol = 1e-8;
    int eigen_cap = 500;
    int monotone_cap = 20000;
    EpsilonSchedule schedule;
};

/// Grid field of a computed solution plus its diagnostics.
struct SolutionField {
    Grid grid;
    ProblemSpec spec;  // spec.lambda is the parameter the field solves for
    Field values;
    double residual = 0.0;
    int iterations = 0;
    NormReport norms;
    std::map<std::string, double> diagnostics;

    double sup() const { return values.size() ? values.maxCoeff() : 0.0; }
};

/// Problem (P_eps): A u = K_eps / (u + eps)^delta with K_eps = min(1/eps, lambda K).
struct RegularizedSpec {
    ProblemSpec base;
    double epsilon = 1.0;
    Field k_eps;
};

RegularizedSpec make_regularized(const ProblemSpec& base, const Grid& grid, double epsilon);

/// Residual A u - lambda (K u^{-delta} + f(u)) in the sup norm.
double equation_residual(const NonlocalOperator& op, const ProblemSpec& spec, const Field& k,
                         double lambda, const Field& u);

/// Unique solution of (P_eps) by Newton on the monotone map u -> A u - K_eps (u+eps)^{-delta}.
/// Without a start the iteration begins at solve_dirichlet(K_eps eps^{-delta}); the first
/// step yields a subsolution that is clipped at 0, after which the iterates increase.
SolutionField solve_regularized(const RegularizedSpec& rspec, const NonlocalOperator& op,
                                double tol, const Field* start = nullptr, int cap = 200);

/// Pure singular problem A u = lambda K u^{-delta}: limit of (P_eps) along a
/// geometric schedule, then an eps = 0 Newton pass from the last level (a subsolution).
SolutionField solve_pure_singular(const ProblemSpec& spec, const NonlocalOperator& op,
                                  const SolverSettings& settings = {});

/// lambda^{1/(delta+1)} u1: exact discrete solution for the weight lambda K.
SolutionField scale_pure_singular(const SolutionField& u1, double lambda);

/// Shared data for solves of one (operator, spec) pair: K, the torsion
/// function U = A^{-1} 1, the unit pure singular solution and phi_{1,s}.
/// Holds a pointer to the operator, which must outlive it.
class SingularProblem {
public:
    SingularProblem(const NonlocalOperator& op, ProblemSpec spec, SolverSettings settings = {});

    const NonlocalOperator& op() const noexcept { return *op_; }
    const ProblemSpec& spec() const noexcept { return spec_; }
    const SolverSettings& settings() const noexcept { return settings_; }
    const Field& k() const noexcept { return k_; }
    const Field& torsion() const noexcept { return torsion_; }
    const SolutionField& unit_singular() const noexcept { return unit_; }
    const EigenPair& principal() const noexcept { return principal_; }
    const WeightProfile& weight_profile() const noexcept { return profile_; }

    /// \underline{u}_lambda.
    SolutionField subsolution(double lambda) const;

    /// Attaches the cone norms and boundary-exponent fit.
    void annotate(SolutionField& u) const;

    ProblemSpec spec_at(double lambda) const;

private:
    const NonlocalOperator* op_;
    ProblemSpec spec_;
    SolverSettings settings_;
    Field k_;
    Field torsion_;
    SolutionField unit_;
    EigenPair principal_;
    WeightProfile profile_;
};

/// A(lambda, h): u > 0 with A u - lambda K u^{-delta} = h.
/// For h >= 0 the iteration starts at \underline{u}_lambda and stays in
/// [\underline{u}_lambda, \underline{u}_lambda + max(h) U]; the bracket is recorded
/// in the diagnostics ("bracket_violation" > 0 when it fails).
SolutionField solve_A(double lambda, const Field& h, const SingularProblem& problem,
                      double tol, const Field* start = nullptr);

struct MonotoneResult {
    SolutionField solution;
    int outer_iterations = 0;
    double shift = 0.0;
};

/// Shifted monotone scheme
///   (A + lambda C) u_n - lambda K u_n^{-delta} = lambda C u_{n-1} + lambda f(u_{n-1})
/// with C = max f' over [0, max super]. Throws InvariantError if an iterate
/// decreases or leaves the bracket.
MonotoneResult monotone_iterate(double lambda, const SolutionField& sub, const SolutionField& super,
                                const SingularProblem& problem, double tol);

enum class MinimalStrategy {
    Auto,               // supersolution from the eqM search when it exists, else monotone Newton
    MonotoneIteration,  // require the eqM supersolution
    MonotoneNewton      // Newton from the subsolution, certified by Cholesky of the linearization
};

struct MinimalOptions {
    MinimalStrategy strategy = MinimalStrategy::Auto;
    const Field* warm_start = nullptr;  // a subsolution, typically u_{lambda'} for lambda' < lambda
    double blowup_factor = 1e6;
};

/// Supersolution \underline{u}_lambda + M U from the doubling search, if one exists.
std::optional<SolutionField> eqm_supersolution(double lambda, const SingularProblem& problem,
                                               const SolutionField& sub, double* found_m = nullptr);

/// Minimal solution u_lambda of (P_lambda). Throws NoMinimalSolution when
/// the construction fails (lambda likely above the extremal value).
SolutionField solve_min(double lambda, const SingularProblem& problem, MinimalOptions options = {});

}  // namespace fracfold
