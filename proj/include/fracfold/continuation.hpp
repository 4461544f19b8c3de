#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracfold/linearization.hpp"
#include "fracfold/singular.hpp"

namespace fracfold {

enum class Segment { Minimal, Upper };

std::string to_string(Segment s);

struct BranchPoint {
    double lambda = 0.0;
    SolutionField solution;
    double sup_norm = 0.0;
    double lambda1 = 0.0;
    double gap = 0.0;
    double monitor = 0.0;
    double arclength = 0.0;
    Segment segment = Segment::Minimal;
    bool fold = false;
};

struct FoldInfo {
    double estimate = 0.0;
    double lambda_ok = 0.0;
    double lambda_fail = 0.0;
    // Filled by fold_round. Derivatives are taken in the normalized arclength,
    // with lambda measured in units of the estimate.
    bool rounded = false;
    double quadratic_coeff = 0.0;  // lambda'' at the fold
    double slope_at_fold = 0.0;    // lambda' where Lambda_1 crosses zero
    double fit_residual = 0.0;
    double arclength_at_fold = 0.0;
    double lambda_max = 0.0;       // largest lambda met along the arclength path
    SolutionField u_at_fold;
};

struct Branch {
    std::vector<BranchPoint> points;
    std::optional<FoldInfo> fold;
    double u_scale = 1.0;  // sup norm used to weight the u-component of the arclength
};

struct ContinuationPolicy {
    double initial_step = 0.02;
    double min_step_ratio = 1e-6;      // stop when the lambda step falls below this times the estimate
    double lambda1_threshold = 1e-6;   // stop when Lambda_1 falls below this times lambda_{1,s}
    double bracket_width = 1e-3;       // relative width of the bisection bracket
    int max_points = 2000;

    double arclength_step = 0.01;      // normalized units
    double arclength_max_step = 1e3;
    double arclength_min_step = 1e-8;
    double fold_window = 0.03;         // lambda/Lambda below which the rounding path starts
    int arclength_steps = 400;
    int corrector_cap = 12;
    double growth_cap = 1e3;           // stop once sup norm exceeds this multiple of the fold sup norm
    double lambda_floor = 1e-6;        // or once lambda / Lambda drops below this
    bool compute_monitor = true;
};

/// Minimal branch by increasing lambda, each solve warm-started from the previous
/// solution; the bracket [lambda_ok, lambda_fail] is then bisected on solve_min success.
Branch trace_minimal(const SingularProblem& problem, const ContinuationPolicy& policy = {});

/// Pseudo-arclength continuation from the minimal branch through the fold onto the
/// upper segment. The u-component of the tangent metric is weighted by
/// 1 / (sqrt(n) |u_fold|_inf) and the lambda-component by 1 / Lambda.
Branch fold_round(const Branch& branch, const SingularProblem& problem, const ContinuationPolicy& policy = {});

struct MultiplicityRow {
    double lambda = 0.0;
    SolutionField minimal;
    std::optional<SolutionField> second;
    double gap = 0.0;
    bool distinct = false;
    bool complete = false;
    std::string note;
};

/// For each target lambda: minimal solution and a second solution on the upper segment
/// (Newton at fixed lambda from the interpolated bracketing upper points).
std::vector<MultiplicityRow> multiplicity_scan(const Branch& rounded, const SingularProblem& problem,
                                               const std::vector<double>& lambdas);

struct AsymptoticReport {
    std::vector<std::pair<double, double>> table;  // (lambda, sup norm) along the upper segment
    double lambda_a = 0.0;                         // infimum of lambda over the segment
    bool reached_cap = false;
    double sup_growth = 0.0;     // max sup / fold sup
    double lambda_shrink = 0.0;  // Lambda / lambda_a
    double tail_exponent = 0.0;  // slope of log sup against log lambda on the tail
};

AsymptoticReport asymptotic_bifurcation_probe(const Branch& rounded, double growth_cap = 1e3);

enum class UniquenessVerdict { Unique, Falsified };

std::string to_string(UniquenessVerdict v);

struct UniquenessReport {
    UniquenessVerdict verdict = UniquenessVerdict::Unique;
    double c0 = 0.0;
    std::uint64_t seed = 0;
    int trials = 0;
    int converged_to_minimal = 0;
    int left_admissible_set = 0;
    int converged_elsewhere = 0;  // to a solution above c0, outside the uniqueness class
    double max_distance = 0.0;    // among starts that reached the minimal solution
};

/// C0 with t -> K_min t^{-delta} + f(t) decreasing on (0, C0]. Requires a power f.
double uniqueness_threshold(const SingularProblem& problem);

/// Newton from random positive starts bounded by C0, plus any explicit starts (clipped to C0).
UniquenessReport uniqueness_probe(double lambda, const SingularProblem& problem, int trials, std::uint64_t seed,
                                  const std::vector<Field>& extra_starts = {});

}  // namespace fracfold
