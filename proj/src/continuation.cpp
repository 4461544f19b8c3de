#include "fracfold/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "fracfold/linalg.hpp"
#include "newton.hpp"

namespace fracfold {

std::string to_string(Segment s) { return s == Segment::Minimal ? "minimal" : "upper"; }

std::string to_string(UniquenessVerdict v) { return v == UniquenessVerdict::Unique ? "UNIQUE" : "FALSIFIED"; }

namespace {

struct Metric {
    double theta_u = 1.0;
    double theta_l = 1.0;

    Metric(int n, double u_scale, double lambda_scale)
        : theta_u(1.0 / (n * u_scale * u_scale)), theta_l(1.0 / (lambda_scale * lambda_scale)) {}

    double dot(const Field& a, double al, const Field& b, double bl) const {
        return theta_u * a.dot(b) + theta_l * al * bl;
    }
    double distance(const Field& a, double al, const Field& b, double bl) const {
        const Field d = a - b;
        return std::sqrt(dot(d, al - bl, d, al - bl));
    }
};

// g(u) = K u^{-delta} + f(u), so the equation reads A u = lambda g(u).
Field source(const SingularProblem& p, const Field& u) { return source_term(p.spec(), p.k(), 1.0, u); }

Matrix jacobian(const SingularProblem& p, double lambda, const Field& u) {
    return linearize(lambda, u, p).matrix;
}

double residual_floor(const SingularProblem& p, double lambda, const Field& u) {
    detail::System sys;
    sys.a = &p.op().matrix();
    sys.weight = lambda * p.k();
    sys.delta = p.spec().delta;
    sys.f = &p.spec().f;
    sys.f_scale = lambda;
    return std::max(p.settings().newton_tol, detail::roundoff_floor(sys, u));
}

BranchPoint make_point(double lambda, SolutionField sol, const SingularProblem& p, bool monitor) {
    BranchPoint pt;
    pt.lambda = lambda;
    pt.sup_norm = sol.sup();
    const auto spec = lambda1(lambda, sol.values, p);
    pt.lambda1 = spec.principal.value;
    pt.gap = spec.relative_gap;
    pt.monitor = monitor ? fredholm_monitor(lambda, sol.values, p) : std::numeric_limits<double>::quiet_NaN();
    pt.solution = std::move(sol);
    return pt;
}

SolutionField as_solution(const SingularProblem& p, double lambda, Field u) {
    SolutionField s;
    s.grid = p.op().grid();
    s.spec = p.spec_at(lambda);
    s.values = std::move(u);
    s.residual = equation_residual(p.op(), s.spec, p.k(), lambda, s.values);
    p.annotate(s);
    return s;
}

void assign_arclength(std::vector<BranchPoint>& pts, const Metric& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            acc += m.distance(pts[i].solution.values, pts[i].lambda, pts[i - 1].solution.values, pts[i - 1].lambda);
        }
        pts[i].arclength = acc;
    }
}

std::optional<SolutionField> try_min(double lambda, const SingularProblem& p, const Field* warm) {
    MinimalOptions opt;
    opt.strategy = MinimalStrategy::MonotoneNewton;
    opt.warm_start = warm;
    try {
        return solve_min(lambda, p, opt);
    } catch (const NoMinimalSolution&) {
        return std::nullopt;
    } catch (const ConvergenceError&) {
        return std::nullopt;
    }
}

}  // namespace

Branch trace_minimal(const SingularProblem& problem, const ContinuationPolicy& policy) {
    if (problem.spec().f.kind() == Nonlinearity::Kind::None) {
        throw std::invalid_argument("trace_minimal: the pure singular problem has no fold");
    }
    if (!(policy.initial_step > 0.0)) throw std::invalid_argument("trace_minimal: step must be positive");
    Branch b;
    const double lambda1s = problem.principal().value;
    double step = policy.initial_step;
    double ok = 0.0;
    double fail = std::numeric_limits<double>::infinity();
    Field warm;
    double lam = step;

    while (static_cast<int>(b.points.size()) < policy.max_points) {
        auto sol = try_min(lam, problem, warm.size() ? &warm : nullptr);
        if (!sol) {
            fail = std::min(fail, lam);
            step *= 0.5;
            if (ok > 0.0 && step < policy.min_step_ratio * ok) break;
            lam = ok + step;
            continue;
        }
        warm = sol->values;
        b.points.push_back(make_point(lam, std::move(*sol), problem, policy.compute_monitor));
        ok = lam;
        if (b.points.back().lambda1 < policy.lambda1_threshold * lambda1s) break;
        while (ok + step >= fail && step >= policy.min_step_ratio * ok) step *= 0.5;
        if (step < policy.min_step_ratio * ok) break;
        lam = ok + step;
    }
    if (b.points.empty()) throw NoMinimalSolution("trace_minimal: no minimal solution at the first step");

    // Bracket the extremal value.
    if (!std::isfinite(fail)) {
        for (int k = 0; k < 60; ++k) {
            const double trial = ok * (1.0 + policy.bracket_width * std::ldexp(1.0, k));
            if (!try_min(trial, problem, &warm)) {
                fail = trial;
                break;
            }
            ok = trial;
        }
        if (!std::isfinite(fail)) throw NoMinimalSolution("trace_minimal: no failure found above the branch");
    }
    while (fail - ok > policy.bracket_width * ok) {
        const double mid = 0.5 * (ok + fail);
        auto sol = try_min(mid, problem, &warm);
        if (!sol) {
            fail = mid;
            continue;
        }
        warm = sol->values;
        b.points.push_back(make_point(mid, std::move(*sol), problem, policy.compute_monitor));
        ok = mid;
    }
    FoldInfo fold;
    fold.lambda_ok = ok;
    fold.lambda_fail = fail;
    fold.estimate = 0.5 * (ok + fail);
    b.fold = fold;
    b.u_scale = b.points.back().sup_norm;
    assign_arclength(b.points, Metric(problem.op().size(), b.u_scale, fold.estimate));
    return b;
}

Branch fold_round(const Branch& branch, const SingularProblem& problem, const ContinuationPolicy& policy) {
    if (!branch.fold || branch.points.empty()) {
        throw std::invalid_argument("fold_round: needs a traced minimal branch with a fold bracket");
    }
    const int n = problem.op().size();
    const double big_lambda = branch.fold->estimate;
    Branch out;
    out.fold = branch.fold;
    out.u_scale = branch.points.back().sup_norm;
    const Metric metric(n, out.u_scale, big_lambda);

    std::size_t start = 0;
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        if (branch.points[i].lambda <= (1.0 - policy.fold_window) * big_lambda) start = i;
    }
    out.points.assign(branch.points.begin(), branch.points.begin() + start + 1);
    assign_arclength(out.points, metric);
    const std::size_t path_begin = start;

    Field u = out.points.back().solution.values;
    double lam = out.points.back().lambda;
    double sigma = out.points.back().arclength;

    // Initial tangent from the minimal branch: du/dlambda = J^{-1} g(u).
    Field tu;
    double tl;
    {
        Eigen::LLT<Matrix> llt(jacobian(problem, lam, u));
        if (llt.info() != Eigen::Success) throw InvariantError("fold_round: start point is not on the minimal branch");
        tu = llt.solve(source(problem, u));
        tl = 1.0;
        const double norm = std::sqrt(metric.dot(tu, tl, tu, tl));
        tu /= norm;
        tl /= norm;
    }

    double ds = policy.arclength_step;
    bool passed = false;
    const double fold_sup = out.u_scale;
    for (int step = 0; step < policy.arclength_steps; ++step) {
        if (ds < policy.arclength_min_step) break;
        const bool near_fold = lam >= (1.0 - policy.fold_window) * big_lambda;
        if (near_fold) ds = std::min(ds, policy.arclength_step);

        Field v = u + ds * tu;
        double mu = lam + ds * tl;
        bool ok = false;
        int it = 0;
        Eigen::PartialPivLU<Matrix> lu;
        for (; it < policy.corrector_cap; ++it) {
            if ((v.array() <= 0.0).any() || !v.allFinite()) break;
            const Field g = source(problem, v);
            const Field res = problem.op().matrix() * v - mu * g;
            const double constraint = metric.dot(tu, tl, v - u, mu - lam) - ds;
            Matrix big(n + 1, n + 1);
            big.topLeftCorner(n, n) = jacobian(problem, mu, v);
            big.topRightCorner(n, 1) = -g;
            big.bottomLeftCorner(1, n) = (metric.theta_u * tu).transpose();
            big(n, n) = metric.theta_l * tl;
            lu.compute(big);
            if (sup_norm(res) <= residual_floor(problem, mu, v) && std::abs(constraint) <= 1e-10 * (1.0 + ds)) {
                ok = true;
                break;
            }
            Field rhs(n + 1);
            rhs.head(n) = -res;
            rhs[n] = -constraint;
            const Field delta = lu.solve(rhs);
            if (!delta.allFinite()) break;
            v += delta.head(n);
            mu += delta[n];
        }
        if (!ok || !(mu > 0.0)) {
            ds *= 0.5;
            continue;
        }

        // New tangent from the bordered system; its last row keeps the orientation.
        Field rhs = Field::Zero(n + 1);
        rhs[n] = 1.0;
        Field t = lu.solve(rhs);
        Field ntu = t.head(n);
        double ntl = t[n];
        const double norm = std::sqrt(metric.dot(ntu, ntl, ntu, ntl));
        ntu /= norm;
        ntl /= norm;

        sigma += metric.distance(v, mu, u, lam);
        u = v;
        lam = mu;
        tu = ntu;
        tl = ntl;

        BranchPoint pt = make_point(lam, as_solution(problem, lam, u), problem, policy.compute_monitor);
        pt.arclength = sigma;
        if (tl < 0.0) passed = true;
        pt.segment = passed ? Segment::Upper : Segment::Minimal;
        out.points.push_back(std::move(pt));

        if (it <= 3 && !(lam >= (1.0 - policy.fold_window) * big_lambda)) {
            ds = std::min(1.5 * ds, policy.arclength_max_step);
        }
        if (passed && (out.points.back().sup_norm >= policy.growth_cap * fold_sup ||
                       lam <= policy.lambda_floor * big_lambda)) {
            break;
        }
    }

    // Locate the fold on the path and fit lambda(sigma) there.
    std::size_t m = path_begin;
    for (std::size_t i = path_begin; i < out.points.size(); ++i) {
        if (out.points[i].lambda > out.points[m].lambda) m = i;
    }
    FoldInfo& fold = *out.fold;
    fold.lambda_max = out.points[m].lambda;
    fold.arclength_at_fold = out.points[m].arclength;
    fold.u_at_fold = out.points[m].solution;
    out.points[m].fold = true;
    const bool interior = m > path_begin && m + 1 < out.points.size();
    if (!interior) return out;

    const std::size_t lo = std::max(path_begin, m >= 3 ? m - 3 : 0);
    const std::size_t hi = std::min(out.points.size() - 1, m + 3);
    const int count = static_cast<int>(hi - lo + 1);
    Matrix design(count, 3);
    Field target(count);
    double span = 0.0;
    for (int r = 0; r < count; ++r) {
        const double x = out.points[lo + r].arclength - fold.arclength_at_fold;
        design(r, 0) = 1.0;
        design(r, 1) = x;
        design(r, 2) = x * x;
        target[r] = out.points[lo + r].lambda / big_lambda;
        span = std::max(span, std::abs(x));
    }
    const Field coef = design.colPivHouseholderQr().solve(target);
    const double rms = (design * coef - target).norm() / std::sqrt(static_cast<double>(count));
    fold.quadratic_coeff = 2.0 * coef[2];
    fold.fit_residual = rms / (std::abs(coef[2]) * span * span);

    // lambda' where Lambda_1 changes sign.
    double crossing = fold.arclength_at_fold;
    for (std::size_t i = path_begin; i + 1 < out.points.size(); ++i) {
        const double a = out.points[i].lambda1;
        const double b = out.points[i + 1].lambda1;
        if (a > 0.0 && b <= 0.0) {
            const double w = a / (a - b);
            crossing = out.points[i].arclength + w * (out.points[i + 1].arclength - out.points[i].arclength);
            break;
        }
    }
    fold.slope_at_fold = coef[1] + 2.0 * coef[2] * (crossing - fold.arclength_at_fold);
    fold.rounded = true;
    return out;
}

std::vector<MultiplicityRow> multiplicity_scan(const Branch& rounded, const SingularProblem& problem,
                                               const std::vector<double>& lambdas) {
    const double tol = problem.settings().newton_tol;
    std::vector<const BranchPoint*> upper;
    for (const auto& p : rounded.points) {
        if (p.segment == Segment::Upper || p.fold) upper.push_back(&p);
    }
    std::vector<MultiplicityRow> rows;
    for (double target : lambdas) {
        MultiplicityRow row;
        row.lambda = target;
        row.minimal = solve_min(target, problem);
        const BranchPoint* a = nullptr;
        const BranchPoint* b = nullptr;
        for (std::size_t i = 0; i + 1 < upper.size(); ++i) {
            if (upper[i]->lambda >= target && upper[i + 1]->lambda <= target) {
                a = upper[i];
                b = upper[i + 1];
                break;
            }
        }
        if (!a) {
            row.note = "target lambda not reached by the upper segment";
            rows.push_back(std::move(row));
            continue;
        }
        const double w = (a->lambda == b->lambda) ? 0.0 : (a->lambda - target) / (a->lambda - b->lambda);
        Field u = (1.0 - w) * a->solution.values + w * b->solution.values;

        // Newton at fixed lambda; the upper solution is a regular point away from the fold.
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
            const Field res = problem.op().matrix() * u - target * source(problem, u);
            if (sup_norm(res) <= residual_floor(problem, target, u)) {
                converged = true;
                break;
            }
            Eigen::PartialPivLU<Matrix> lu(jacobian(problem, target, u));
            const Field step = lu.solve(Field(-res));
            double t = 1.0;
            while (t > 1e-6 && ((u + t * step).array() <= 0.0).any()) t *= 0.5;
            if (t <= 1e-6 || !step.allFinite()) break;
            u += t * step;
        }
        if (!converged) {
            row.note = "Newton at fixed lambda did not converge on the upper segment";
            rows.push_back(std::move(row));
            continue;
        }
        row.second = as_solution(problem, target, u);
        row.gap = sup_norm(row.second->values - row.minimal.values);
        row.distinct = row.gap >= 10.0 * tol;
        row.complete = true;
        rows.push_back(std::move(row));
    }
    return rows;
}

AsymptoticReport asymptotic_bifurcation_probe(const Branch& rounded, double growth_cap) {
    AsymptoticReport r;
    if (!rounded.fold || !rounded.fold->rounded) {
        throw std::invalid_argument("asymptotic_bifurcation_probe: branch has no rounded fold");
    }
    const double fold_sup = rounded.fold->u_at_fold.sup();
    for (const auto& p : rounded.points) {
        if (p.segment == Segment::Upper) r.table.emplace_back(p.lambda, p.sup_norm);
    }
    if (r.table.empty()) return r;
    r.lambda_a = r.table.front().first;
    double top = 0.0;
    for (const auto& [l, s] : r.table) {
        r.lambda_a = std::min(r.lambda_a, l);
        top = std::max(top, s);
    }
    r.sup_growth = top / fold_sup;
    r.reached_cap = top >= growth_cap * fold_sup;
    r.lambda_shrink = rounded.fold->estimate / r.lambda_a;

    // Tail: points beyond ten times the fold norm, or the last third of the segment.
    std::vector<std::pair<double, double>> tail;
    for (const auto& e : r.table) {
        if (e.second >= 10.0 * fold_sup) tail.push_back(e);
    }
    if (tail.size() < 3) tail.assign(r.table.end() - std::max<std::ptrdiff_t>(0, r.table.size() / 3), r.table.end());
    if (tail.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [l, s] : tail) {
            const double x = std::log(l), y = std::log(s);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(tail.size());
        r.tail_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    return r;
}

double uniqueness_threshold(const SingularProblem& problem) {
    const auto& f = problem.spec().f;
    if (f.kind() != Nonlinearity::Kind::Power) {
        throw std::invalid_argument("uniqueness_threshold: needs a power nonlinearity");
    }
    const double delta = problem.spec().delta;
    if (!(delta > 0.0)) throw std::invalid_argument("uniqueness_threshold: needs delta > 0");
    const double p = f.exponent();
    return std::pow(delta * problem.k().minCoeff() / (f.coefficient() * p), 1.0 / (p + delta));
}

UniquenessReport uniqueness_probe(double lambda, const SingularProblem& problem, int trials, std::uint64_t seed,
                                  const std::vector<Field>& extra_starts) {
    UniquenessReport r;
    r.c0 = uniqueness_threshold(problem);
    r.seed = seed;
    const double tol = problem.settings().newton_tol;
    const SolutionField minimal = solve_min(lambda, problem);
    if (!(minimal.sup() < r.c0)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "uniqueness_probe: |u_lambda| = %.4g is not below C0 = %.4g", minimal.sup(), r.c0);
        throw std::invalid_argument(buf);
    }
    const int n = problem.op().size();
    std::vector<Field> starts;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    for (int t = 0; t < trials; ++t) {
        Field s(n);
        for (int i = 0; i < n; ++i) s[i] = r.c0 * unit(rng);
        starts.push_back(std::move(s));
    }
    for (const auto& e : extra_starts) {
        if (e.size() != n) throw std::invalid_argument("uniqueness_probe: start size");
        starts.push_back(e.cwiseMin(r.c0).cwiseMax(1e-12));
    }

    detail::System sys;
    sys.a = &problem.op().matrix();
    sys.weight = lambda * problem.k();
    sys.delta = problem.spec().delta;
    sys.f = &problem.spec().f;
    sys.f_scale = lambda;
    for (const auto& s : starts) {
        ++r.trials;
        auto out = detail::newton(sys, s, tol, problem.settings().newton_cap, detail::Mode::Damped, 1e3 * r.c0);
        if (out.status != detail::Status::Converged) {
            ++r.left_admissible_set;
            continue;
        }
        const double dist = sup_norm(out.u - minimal.values);
        if (dist <= 10.0 * tol) {
            ++r.converged_to_minimal;
            r.max_distance = std::max(r.max_distance, dist);
        } else if (sup_norm(out.u) <= r.c0) {
            r.verdict = UniquenessVerdict::Falsified;
        } else {
            ++r.converged_elsewhere;
        }
    }
    return r;
}

}  // namespace fracfold
