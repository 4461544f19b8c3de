// fracfold: command line driver. Exit 0 on success, 1 on usage or run errors,
// 2 when a verification check fails.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracfold/config.hpp"
#include "fracfold/continuation.hpp"
#include "fracfold/fracops.hpp"
#include "fracfold/io.hpp"
#include "fracfold/linalg.hpp"
#include "fracfold/singular.hpp"
#include "fracfold/verify.hpp"

using namespace fracfold;
using nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::optional<double> s, delta, beta, p, lambda, half_width;
    std::optional<int> n;
    std::optional<std::string> out, suite;
    std::optional<std::uint64_t> seed;
    bool dump_matrix = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config, "config file (key = value under [section])")->check(CLI::ExistingFile);
        cmd->add_option("--s", s, "fractional order in (0,1)");
        cmd->add_option("--delta", delta, "singular exponent");
        cmd->add_option("--beta", beta, "weight exponent, K = d^-beta");
        cmd->add_option("--p", p, "power nonlinearity exponent, 0 for none");
        cmd->add_option("--lambda", lambda, "parameter lambda");
        cmd->add_option("--n", n, "interior nodes");
        cmd->add_option("--half-width", half_width, "L, domain is (-L, L)");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--seed", seed, "seed for randomized probes");
        cmd->add_option("--suite", suite, "verification suite, or all");
        cmd->add_flag("--dump-matrix", dump_matrix, "write the operator as i j value triplets");
    }

    RunConfig resolve() const {
        RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
        if (s) cfg.s = *s;
        if (delta) cfg.delta = *delta;
        if (beta) cfg.beta = *beta;
        if (p) cfg.p = *p;
        if (lambda) cfg.lambda = *lambda;
        if (n) cfg.n = *n;
        if (half_width) cfg.half_width = *half_width;
        if (out) cfg.out_dir = *out;
        if (seed) cfg.seed = *seed;
        if (suite) cfg.suite = *suite;
        if (dump_matrix) cfg.dump_matrix = true;
        return cfg;
    }
};

std::string stem_of(const RunConfig& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "s%g_d%g_b%g_p%g_n%d", c.s, c.delta, c.beta, c.p, c.n);
    return buf;
}

std::string join(const std::string& dir, const std::string& name) { return dir + "/" + name; }

void summary(const std::string& path, const std::string& what) { std::printf("%s: %s\n", path.c_str(), what.c_str()); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int assemble_check(const RunConfig& cfg) {
    const NonlocalOperator op(cfg.grid(), cfg.s);
    const Matrix& a = op.matrix();
    const int n = op.size();
    int sign = 0, asym = 0;
    const double amax = a.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (!(a(i, i) > 0.0)) ++sign;
        for (int j = 0; j < n; ++j) {
            if (i != j && a(i, j) > 0.0) ++sign;
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * amax) ++asym;
        }
    }
    // Getoor: A w = 1 has w = (L^2 - x^2)^s / Gamma(2s+1).
    const Field w = solve_dirichlet(op, Field::Ones(n));
    double err = 0.0, top = 0.0;
    const double l = op.grid().half_width;
    for (int i = 0; i < n; ++i) {
        const double x = op.grid().nodes[i];
        const double exact = std::pow(l * l - x * x, cfg.s) / std::tgamma(2.0 * cfg.s + 1.0);
        err = std::max(err, std::abs(w[i] - exact));
        top = std::max(top, exact);
    }
    const auto pairs = eigen_smallest(op, 1, cfg.eigen_tol, cfg.eigen_cap);

    const std::string dir = output_directory(cfg);
    json j{{"s", cfg.s},
           {"n", n},
           {"L", l},
           {"normalization", op.normalization()},
           {"sign_violations", sign},
           {"symmetry_violations", asym},
           {"min_row_sum", op.tail().minCoeff()},
           {"getoor_relative_error", err / top},
           {"lambda1", pairs.front().value}};
    const std::string path = join(dir, "assemble_" + stem_of(cfg) + ".json");
    write_atomic(path, j.dump(2) + "\n");
    summary(path, fmt("sign violations %g, Getoor relative error %.4g, lambda1 %.6g", sign, err / top,
                      pairs.front().value));
    if (cfg.dump_matrix) {
        std::ostringstream t;
        dump_triplets(op, t);
        const std::string mpath = join(dir, "matrix_" + stem_of(cfg) + ".txt");
        write_atomic(mpath, t.str());
        summary(mpath, fmt("%g x %g triplets", n, n));
    }
    return sign + asym == 0 ? 0 : 2;
}

void write_solution(const RunConfig& cfg, const SolutionField& u, const std::string& kind) {
    const std::string dir = output_directory(cfg);
    const std::string path = join(dir, kind + "_" + stem_of(cfg) + ".json");
    write_atomic(path, solution_json(u).dump(2) + "\n");
    summary(path, fmt("sup %.6g, residual %.3g, fitted exponent %.4f", u.sup(), u.residual, u.norms.fitted_exponent));
    const std::string prof = export_plot_data(u, dir, kind + "_" + stem_of(cfg));
    summary(prof, "boundary profile d, u");
}

int solve_ps(RunConfig cfg) {
    cfg.p = 0.0;
    const NonlocalOperator op(cfg.grid(), cfg.s);
    write_solution(cfg, solve_pure_singular(cfg.problem(), op, cfg.solver()), "ps");
    return 0;
}

int solve_plambda(const RunConfig& cfg) {
    const NonlocalOperator op(cfg.grid(), cfg.s);
    const SingularProblem problem(op, cfg.problem(), cfg.solver());
    write_solution(cfg, solve_min(cfg.lambda, problem), "min");
    return 0;
}

void write_branch(const RunConfig& cfg, const Branch& b, const std::string& kind) {
    const std::string dir = output_directory(cfg);
    const std::string path = join(dir, kind + "_" + stem_of(cfg) + ".csv");
    write_atomic(path, branch_csv(b));
    summary(path, fmt("%g points, Lambda estimate %.7g", static_cast<double>(b.points.size()),
                      b.fold ? b.fold->estimate : std::nan("")));
    summary(export_plot_data(b, dir, kind + "_" + stem_of(cfg)), "bifurcation diagram lambda, sup");
}

int branch(const RunConfig& cfg) {
    const NonlocalOperator op(cfg.grid(), cfg.s);
    const SingularProblem problem(op, cfg.problem(), cfg.solver());
    write_branch(cfg, trace_minimal(problem, cfg.continuation()), "branch");
    return 0;
}

int fold(const RunConfig& cfg) {
    const NonlocalOperator op(cfg.grid(), cfg.s);
    const SingularProblem problem(op, cfg.problem(), cfg.solver());
    const Branch b = fold_round(trace_minimal(problem, cfg.continuation()), problem, cfg.continuation());
    write_branch(cfg, b, "fold");
    const FoldInfo& f = *b.fold;
    const AsymptoticReport tail = asymptotic_bifurcation_probe(b, cfg.growth_cap);
    json j{{"lambda_estimate", f.estimate},
           {"lambda_max", f.lambda_max},
           {"rounded", f.rounded},
           {"slope_at_fold", f.slope_at_fold},
           {"second_derivative", f.quadratic_coeff},
           {"fit_residual", f.fit_residual},
           {"sup_at_fold", f.u_at_fold.sup()},
           {"lambda_infimum", tail.lambda_a},
           {"sup_growth", tail.sup_growth},
           {"tail_exponent", tail.tail_exponent}};
    const std::string path = join(output_directory(cfg), "fold_" + stem_of(cfg) + ".json");
    write_atomic(path, j.dump(2) + "\n");
    summary(path, fmt("lambda' %.3g, lambda'' %.4g, lambda infimum %.4g", f.slope_at_fold, f.quadratic_coeff,
                      tail.lambda_a));
    return 0;
}

int multiplicity(const RunConfig& cfg) {
    const NonlocalOperator op(cfg.grid(), cfg.s);
    const SingularProblem problem(op, cfg.problem(), cfg.solver());
    const Branch b = fold_round(trace_minimal(problem, cfg.continuation()), problem, cfg.continuation());
    const double big = b.fold->estimate;
    const auto rows = multiplicity_scan(b, problem, {0.5 * big, 0.7 * big, 0.9 * big});
    json j = json::array();
    for (const auto& r : rows) {
        j.push_back({{"lambda", r.lambda},
                     {"minimal_sup", r.minimal.sup()},
                     {"second_sup", r.second ? json(r.second->sup()) : json()},
                     {"gap", r.gap},
                     {"distinct", r.distinct},
                     {"note", r.note}});
    }
    const std::string path = join(output_directory(cfg), "multiplicity_" + stem_of(cfg) + ".json");
    write_atomic(path, j.dump(2) + "\n");
    summary(path, fmt("gaps %.4g %.4g %.4g", rows[0].gap, rows[1].gap, rows[2].gap));
    return 0;
}

int verify(const RunConfig& cfg) {
    const VerificationReport r = verify_suite(cfg);
    std::fputs(report_table(r).c_str(), stdout);
    const std::string path = join(output_directory(cfg), "verify_" + cfg.suite + ".json");
    write_atomic(path, report_json(r).dump(2) + "\n");
    int failed = 0;
    for (const auto& x : r.records) failed += x.pass ? 0 : 1;
    summary(path, fmt("%g records, %g failed", static_cast<double>(r.records.size()), failed));
    return r.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracfold: singular fractional problems, minimal branches and folds"};
    app.require_subcommand(1);

    Overrides ov;
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Command commands[] = {
        {"assemble-check", "assemble the operator and check sign pattern and the Getoor solution", assemble_check},
        {"solve-ps", "solve the pure singular problem", [](const RunConfig& c) { return solve_ps(c); }},
        {"solve-plambda", "minimal solution at --lambda", solve_plambda},
        {"branch", "trace the minimal branch up to the fold", branch},
        {"fold", "trace, round the fold and follow the upper segment", fold},
        {"multiplicity", "two solutions at 0.5, 0.7, 0.9 Lambda", multiplicity},
        {"verify", "run the verification suite", verify},
    };
    for (const auto& c : commands) ov.attach(app.add_subcommand(c.name, c.help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunConfig cfg;
    try {
        cfg = ov.resolve();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fracfold: %s\n", e.what());
        return 1;
    }
    for (const auto& c : commands) {
        if (!app.got_subcommand(c.name)) continue;
        try {
            return c.run(cfg);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "fracfold %s: %s\n", c.name, e.what());
            return 1;
        }
    }
    return 1;
}
