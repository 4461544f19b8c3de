#include "fracfold/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fracfold/linalg.hpp"
#include "newton.hpp"

namespace fracfold {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void require_positive(const Field& u, const char* where) {
    for (int i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0) || !std::isfinite(u[i])) {
            throw InvariantError(std::string(where) + ": solution is not strictly positive at node " +
                                 std::to_string(i));
        }
    }
}

detail::System full_system(const SingularProblem& p, double lambda) {
    detail::System sys;
    sys.a = &p.op().matrix();
    sys.weight = lambda * p.k();
    sys.delta = p.spec().delta;
    if (p.spec().f.kind() != Nonlinearity::Kind::None) {
        sys.f = &p.spec().f;
        sys.f_scale = lambda;
    }
    return sys;
}

}  // namespace

RegularizedSpec make_regularized(const ProblemSpec& base, const Grid& grid, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("regularization parameter must be positive");
    RegularizedSpec r;
    r.base = base;
    r.epsilon = epsilon;
    r.k_eps = (base.lambda * weight_field(base, grid)).cwiseMin(1.0 / epsilon);
    return r;
}

double equation_residual(const NonlocalOperator& op, const ProblemSpec& spec, const Field& k,
                         double lambda, const Field& u) {
    return sup_norm(apply(op, u) - source_term(spec, k, lambda, u));
}

SolutionField solve_regularized(const RegularizedSpec& rspec, const NonlocalOperator& op, double tol,
                                const Field* start, int cap) {
    detail::System sys;
    sys.a = &op.matrix();
    sys.weight = rspec.k_eps;
    sys.delta = rspec.base.delta;
    sys.eps = rspec.epsilon;
    // 0 is a subsolution; so is any solution for a larger epsilon.
    Field u0 = start ? *start : Field::Zero(op.size());
    auto out = detail::newton(sys, u0, tol, cap, detail::Mode::Monotone);
    if (out.status != detail::Status::Converged) {
        throw ConvergenceError(std::string("solve_regularized: ") + detail::describe(out.status) +
                                   fmt(" at eps = %.3g (residual %.3g)", rspec.epsilon, out.residual),
                               out.residual, out.iterations);
    }
    SolutionField sol;
    sol.grid = op.grid();
    sol.spec = rspec.base;
    sol.values = std::move(out.u);
    sol.residual = out.residual;
    sol.iterations = out.iterations;
    sol.diagnostics["epsilon"] = rspec.epsilon;
    return sol;
}

SolutionField solve_pure_singular(const ProblemSpec& spec, const NonlocalOperator& op,
                                  const SolverSettings& settings) {
    if (spec.f.kind() != Nonlinearity::Kind::None) {
        throw std::invalid_argument("solve_pure_singular: spec carries a nonlinearity");
    }
    if (!(spec.lambda > 0.0)) throw std::invalid_argument("solve_pure_singular: lambda must be positive");
    const auto& sched = settings.schedule;
    if (!(sched.ratio > 0.0 && sched.ratio < 1.0) || !(sched.initial > 0.0)) {
        throw std::invalid_argument("solve_pure_singular: bad epsilon schedule");
    }
    double eps = sched.initial;
    SolutionField level = solve_regularized(make_regularized(spec, op.grid(), eps), op,
                                            settings.newton_tol, nullptr, settings.newton_cap);
    int levels = 1;
    double gap = 0.0;
    bool settled = false;
    for (; levels < sched.max_levels; ++levels) {
        eps *= sched.ratio;
        SolutionField next = solve_regularized(make_regularized(spec, op.grid(), eps), op,
                                               settings.newton_tol, &level.values, settings.newton_cap);
        gap = sup_norm(next.values - level.values);
        level = std::move(next);
        if (gap <= sched.stop) {
            settled = true;
            break;
        }
    }
    if (!settled) {
        throw ConvergenceError(fmt("solve_pure_singular: epsilon schedule exhausted, last gap %.3g at eps %.3g",
                                   gap, eps) + " (regime " + to_string(spec.regime()) + ")",
                               gap, levels);
    }

    // eps = 0 pass: the last level is a subsolution of the limit problem.
    detail::System sys;
    sys.a = &op.matrix();
    sys.weight = spec.lambda * weight_field(spec, op.grid());
    sys.delta = spec.delta;
    auto out = detail::newton(sys, level.values, settings.newton_tol, settings.newton_cap,
                              detail::Mode::Monotone);
    if (out.status != detail::Status::Converged) {
        throw ConvergenceError(std::string("solve_pure_singular: limit pass ") + detail::describe(out.status),
                               out.residual, out.iterations);
    }
    require_positive(out.u, "solve_pure_singular");
    SolutionField sol;
    sol.grid = op.grid();
    sol.spec = spec;
    sol.diagnostics["levels"] = levels + 1;
    sol.diagnostics["final_epsilon"] = eps;
    sol.diagnostics["schedule_gap"] = gap;
    sol.diagnostics["limit_shift"] = sup_norm(out.u - level.values);
    sol.values = std::move(out.u);
    sol.residual = out.residual;
    sol.iterations = out.iterations;
    // Boundary fit only; the cone norm needs phi_1 and is filled in by SingularProblem.
    try {
        const auto fit = fit_boundary_exponent(sol.values, sol.grid);
        sol.norms.fitted_exponent = fit.alpha;
        sol.norms.fit_r2 = fit.r2;
    } catch (const std::invalid_argument&) {
    }
    return sol;
}

SolutionField scale_pure_singular(const SolutionField& u1, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale_pure_singular: lambda must be positive");
    const double factor = std::pow(lambda / u1.spec.lambda, 1.0 / (u1.spec.delta + 1.0));
    SolutionField out = u1;
    out.values *= factor;
    out.spec.lambda = lambda;
    // A u and lambda K u^{-delta} both scale by the same factor.
    out.residual = u1.residual * factor;
    out.diagnostics["scale_factor"] = factor;
    return out;
}

SingularProblem::SingularProblem(const NonlocalOperator& op, ProblemSpec spec, SolverSettings settings)
    : op_(&op), spec_(std::move(spec)), settings_(settings) {
    audit(spec_);
    k_ = weight_field(spec_, op.grid());
    torsion_ = solve_dirichlet(op, Field::Ones(op.size()));
    ProblemSpec unit = spec_;
    unit.lambda = 1.0;
    unit.f = Nonlinearity::none();
    unit_ = solve_pure_singular(unit, op, settings_);
    principal_ = eigen_smallest(op, 1, settings_.eigen_tol, settings_.eigen_cap).front();
    profile_ = build_weight_profile(principal_.vector, spec_.s, spec_.delta, spec_.beta);

    // c phi_1 is a subsolution for c^{1+delta} <= K / (lambda_1 phi_1^{1+delta}); the
    // computed solution has to dominate the largest such multiple.
    const Field& phi = principal_.vector;
    double c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < phi.size(); ++i) {
        c = std::min(c, std::pow(k_[i] / (principal_.value * std::pow(phi[i], 1.0 + spec_.delta)),
                                 1.0 / (1.0 + spec_.delta)));
    }
    const double margin = (unit_.values - c * phi).minCoeff();
    unit_.diagnostics["subsolution_multiple"] = c;
    unit_.diagnostics["subsolution_margin"] = margin;
    if (margin < -1e-6 * unit_.sup()) {
        throw InvariantError(fmt("pure singular solution falls below the subsolution c phi_1 (c = %.4g, margin %.3g)",
                                 c, margin));
    }
    annotate(unit_);
}

ProblemSpec SingularProblem::spec_at(double lambda) const {
    ProblemSpec s = spec_;
    s.lambda = lambda;
    return s;
}

SolutionField SingularProblem::subsolution(double lambda) const {
    SolutionField u = scale_pure_singular(unit_, lambda);
    u.spec = spec_at(lambda);
    return u;
}

void SingularProblem::annotate(SolutionField& u) const {
    u.norms = cone_norms(u.values, profile_);
    try {
        const auto fit = fit_boundary_exponent(u.values, u.grid);
        u.norms.fitted_exponent = fit.alpha;
        u.norms.fit_r2 = fit.r2;
    } catch (const std::invalid_argument&) {
        // grid too coarse for a fit
    }
    const double gamma = predicted_exponent(spec_.s, spec_.delta, spec_.beta);
    u.norms.holder[gamma] = holder_seminorm(u.values, u.grid, gamma);
}

SolutionField solve_A(double lambda, const Field& h, const SingularProblem& problem, double tol,
                      const Field* start) {
    const auto& op = problem.op();
    if (h.size() != op.size()) throw std::invalid_argument("solve_A: dimension mismatch");
    if (!(lambda >= 0.0)) throw std::invalid_argument("solve_A: lambda must be >= 0");
    const bool nonnegative = h.minCoeff() >= 0.0;

    SolutionField sol;
    sol.grid = op.grid();
    sol.spec = problem.spec_at(lambda);
    sol.spec.f = Nonlinearity::none();
    if (lambda == 0.0) {
        if (!nonnegative || h.maxCoeff() <= 0.0) {
            throw std::invalid_argument("solve_A: lambda = 0 needs h >= 0, h != 0");
        }
        sol.values = solve_dirichlet(op, h);
        sol.residual = sup_norm(apply(op, sol.values) - h);
        require_positive(sol.values, "solve_A");
        return sol;
    }

    const SolutionField sub = problem.subsolution(lambda);
    detail::System sys;
    sys.a = &op.matrix();
    sys.weight = lambda * problem.k();
    sys.delta = problem.spec().delta;
    sys.rhs = h;

    detail::Outcome out;
    if (!start && nonnegative) {
        out = detail::newton(sys, sub.values, tol, problem.settings().newton_cap, detail::Mode::Monotone);
    } else {
        const Field& u0 = start ? *start : sub.values;
        if (u0.size() != op.size() || (u0.array() <= 0.0).any()) {
            throw std::invalid_argument("solve_A: start must be a positive field");
        }
        out = detail::newton(sys, u0, tol, problem.settings().newton_cap, detail::Mode::Damped);
    }
    if (out.status != detail::Status::Converged) {
        throw ConvergenceError(std::string("solve_A: ") + detail::describe(out.status), out.residual,
                               out.iterations);
    }
    require_positive(out.u, "solve_A");
    sol.values = std::move(out.u);
    sol.residual = out.residual;
    sol.iterations = out.iterations;
    if (nonnegative) {
        const Field upper = sub.values + h.maxCoeff() * problem.torsion();
        const double slack = 1e-9 * (sup_norm(upper) + 1.0);
        const double below = (sub.values - sol.values).maxCoeff();
        const double above = (sol.values - upper).maxCoeff();
        sol.diagnostics["bracket_violation"] = std::max({0.0, below - slack, above - slack});
    }
    return sol;
}

MonotoneResult monotone_iterate(double lambda, const SolutionField& sub, const SolutionField& super,
                                const SingularProblem& problem, double tol) {
    const auto& op = problem.op();
    const auto& spec = problem.spec();
    if (sub.values.size() != op.size() || super.values.size() != op.size()) {
        throw std::invalid_argument("monotone_iterate: dimension mismatch");
    }
    const double slack = 1e-9 * (sup_norm(super.values) + 1.0);
    if ((sub.values - super.values).maxCoeff() > slack) {
        throw std::invalid_argument("monotone_iterate: subsolution exceeds supersolution");
    }
    MonotoneResult res;
    res.shift = spec.f.max_derivative(super.values.maxCoeff());

    detail::System inner;
    inner.a = &op.matrix();
    inner.weight = lambda * problem.k();
    inner.delta = spec.delta;
    inner.shift = lambda * res.shift;

    Field u = sub.values;
    double r = equation_residual(op, spec, problem.k(), lambda, u);
    const int cap = problem.settings().monotone_cap;
    int n = 0;
    for (; n < cap && r > tol; ++n) {
        inner.rhs = lambda * (res.shift * u + spec.f.value(u));
        // u is a subsolution of the inner problem, so Newton from it increases.
        auto out = detail::newton(inner, u, 0.1 * tol, problem.settings().newton_cap, detail::Mode::Monotone);
        if (out.status != detail::Status::Converged) {
            throw ConvergenceError(std::string("monotone_iterate: inner solve ") + detail::describe(out.status),
                                   out.residual, n);
        }
        if ((u - out.u).maxCoeff() > slack) {
            throw InvariantError(fmt("monotone_iterate: iterate %g decreased by %.3g", n, (u - out.u).maxCoeff()));
        }
        if ((out.u - super.values).maxCoeff() > slack) {
            throw InvariantError(fmt("monotone_iterate: iterate %g left the bracket by %.3g", n,
                                     (out.u - super.values).maxCoeff()));
        }
        const double change = sup_norm(out.u - u);
        u = std::move(out.u);
        r = equation_residual(op, spec, problem.k(), lambda, u);
        if (change == 0.0) break;
    }
    if (r > tol) {
        detail::System full = full_system(problem, lambda);
        if (r > detail::roundoff_floor(full, u)) {
            throw ConvergenceError(fmt("monotone_iterate: residual %.3g after %g iterations", r, n), r, n);
        }
    }
    res.outer_iterations = n;
    res.solution.grid = op.grid();
    res.solution.spec = problem.spec_at(lambda);
    res.solution.values = std::move(u);
    res.solution.residual = r;
    res.solution.iterations = n;
    return res;
}

std::optional<SolutionField> eqm_supersolution(double lambda, const SingularProblem& problem,
                                               const SolutionField& sub, double* found_m) {
    const auto& op = problem.op();
    const auto& spec = problem.spec();
    const double top = 2.0 * sub.values.maxCoeff();
    double m = std::max(1.0, lambda * spec.f.value(top));
    const double slack = 10.0 * problem.settings().newton_tol + 1e-12 * sub.sup();
    for (int k = 0; k <= 40; ++k, m *= 2.0) {
        Field w = sub.values + m * problem.torsion();
        const Field defect = apply(op, w) - source_term(spec, problem.k(), lambda, w);
        if (defect.allFinite() && defect.minCoeff() >= -slack) {
            if (found_m) *found_m = m;
            SolutionField out;
            out.grid = op.grid();
            out.spec = problem.spec_at(lambda);
            out.values = std::move(w);
            out.residual = sup_norm(defect);
            return out;
        }
    }
    return std::nullopt;
}

SolutionField solve_min(double lambda, const SingularProblem& problem, MinimalOptions options) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_min: lambda must be positive");
    const auto& op = problem.op();
    const double tol = problem.settings().newton_tol;
    SolutionField sub = problem.subsolution(lambda);
    Field start = sub.values;
    if (options.warm_start) {
        if (options.warm_start->size() != op.size()) throw std::invalid_argument("solve_min: warm start size");
        start = start.cwiseMax(*options.warm_start);
    }

    SolutionField result;
    double m = 0.0;
    bool monotone_scheme = false;
    if (options.strategy != MinimalStrategy::MonotoneNewton) {
        auto super = eqm_supersolution(lambda, problem, sub, &m);
        if (super && (start - super->values).maxCoeff() <= 0.0) {
            SolutionField lower = sub;
            lower.values = start;
            // The shifted scheme contracts slowly near the fold; stop it early
            // and let Newton, still started below u_lambda, finish.
            const double coarse = std::max(tol, 1e-6 * (1.0 + sup_norm(apply(op, super->values))));
            auto mono = monotone_iterate(lambda, lower, *super, problem, coarse);
            start = mono.solution.values;
            monotone_scheme = true;
            result.diagnostics["monotone_iterations"] = mono.outer_iterations;
            result.diagnostics["monotone_shift"] = mono.shift;
        } else if (options.strategy == MinimalStrategy::MonotoneIteration) {
            throw NoMinimalSolution(fmt("solve_min: no supersolution of the form u_sub + M U at lambda = %.6g",
                                        lambda));
        }
    }

    detail::System sys = full_system(problem, lambda);
    const double cap = options.blowup_factor * (sup_norm(start) + 1.0);
    auto out = detail::newton(sys, start, tol, problem.settings().newton_cap, detail::Mode::Monotone, cap);
    switch (out.status) {
        case detail::Status::Converged: break;
        case detail::Status::Indefinite:
        case detail::Status::Blowup:
            throw NoMinimalSolution(fmt("solve_min: lambda = %.8g, ", lambda) + detail::describe(out.status) +
                                    " (lambda is likely above the extremal value)");
        case detail::Status::Decrease:
            throw InvariantError(fmt("solve_min: monotone Newton decreased an iterate at lambda = %.8g", lambda));
        default:
            throw ConvergenceError(std::string("solve_min: ") + detail::describe(out.status) +
                                       fmt(" at lambda = %.8g", lambda),
                                   out.residual, out.iterations);
    }
    require_positive(out.u, "solve_min");
    result.grid = op.grid();
    result.spec = problem.spec_at(lambda);
    result.values = std::move(out.u);
    result.residual = out.residual;
    result.iterations = out.iterations;
    result.diagnostics["strategy_monotone_scheme"] = monotone_scheme ? 1.0 : 0.0;
    result.diagnostics["eqm_M"] = m;
    problem.annotate(result);
    return result;
}

}  // namespace fracfold
