#include "fracfold/weights.hpp"

#include <cmath>
#include <stdexcept>

#include "fracfold/linalg.hpp"
#include "fracfold/problem.hpp"

namespace fracfold {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Sub: return "SUB";
        case Regime::Critical: return "CRITICAL";
        case Regime::Super: return "SUPER";
    }
    return "UNKNOWN";
}

std::string to_string(MassVerdict v) { return v == MassVerdict::Finite ? "finite" : "diverging"; }

Regime classify_regime(double s, double delta, double beta) {
    const double ratio = beta / s + delta;
    if (std::abs(ratio - 1.0) <= 1e-12) return Regime::Critical;
    return ratio < 1.0 ? Regime::Sub : Regime::Super;
}

double predicted_exponent(double s, double delta, double beta) {
    if (classify_regime(s, delta, beta) == Regime::Super) return (2.0 * s - beta) / (delta + 1.0);
    return s;
}

Field distance_field(const Grid& grid) {
    Field d(grid.n);
    for (int i = 0; i < grid.n; ++i) d[i] = grid.distance(i);
    return d;
}

Field weight_k(const Grid& grid, double beta, double coefficient, double s) {
    if (!(beta >= 0.0) || !(beta < 2.0 * s)) {
        throw std::invalid_argument("weight_k: beta must lie in [0, 2s)");
    }
    if (!(coefficient > 0.0)) throw std::invalid_argument("weight_k: coefficient must be positive");
    Field k(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        k[i] = beta == 0.0 ? coefficient : coefficient * std::pow(grid.distance(i), -beta);
    }
    return k;
}

WeightProfile build_weight_profile(const Field& phi1s, double s, double delta, double beta) {
    if (phi1s.size() == 0 || (phi1s.array() <= 0.0).any()) {
        throw std::invalid_argument("build_weight_profile: eigenfunction must be strictly positive");
    }
    if (std::abs(phi1s.maxCoeff() - 1.0) > 1e-10) {
        throw std::invalid_argument("build_weight_profile: eigenfunction must be sup-normalized to 1");
    }
    WeightProfile w;
    w.s = s;
    w.delta = delta;
    w.beta = beta;
    w.regime = classify_regime(s, delta, beta);
    w.reference = phi1s;
    switch (w.regime) {
        case Regime::Sub:
            w.values = phi1s;
            break;
        case Regime::Critical:
            w.values = phi1s.unaryExpr(
                [delta](double p) { return p * std::pow(std::log(2.0 / p), 1.0 / (delta + 1.0)); });
            break;
        case Regime::Super: {
            const double power = (2.0 * s - beta) / ((delta + 1.0) * s);
            w.values = phi1s.unaryExpr([power](double p) { return std::pow(p, power); });
            break;
        }
    }
    return w;
}

NormReport cone_norms(const Field& u, const WeightProfile& w) {
    if (u.size() != w.values.size()) throw std::invalid_argument("cone_norms: dimension mismatch");
    NormReport r;
    const Field ratio = u.cwiseQuotient(w.values);
    r.cone_norm = sup_norm(ratio);
    r.cone_lower = ratio.size() ? ratio.minCoeff() : 0.0;
    return r;
}

namespace {

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return f;
}

}  // namespace

ExponentFit fit_boundary_exponent(const Field& u, const Grid& grid, double window) {
    if (u.size() != grid.n) throw std::invalid_argument("fit_boundary_exponent: dimension mismatch");
    const double lo = 2.0 * grid.h * (1.0 - 1e-12);
    const double hi = window * grid.half_width * (1.0 + 1e-12);

    std::vector<double> lx, ly, rx, ry;
    for (int i = 0; i < grid.n; ++i) {
        const double d = grid.distance(i);
        if (d < lo || d > hi) continue;
        if (!(u[i] > 0.0)) throw std::invalid_argument("fit_boundary_exponent: u must be positive near the boundary");
        // The middle node of an odd grid belongs to neither side.
        if (2 * (i + 1) == grid.n + 1) continue;
        auto& xs = (2 * (i + 1) < grid.n + 1) ? lx : rx;
        auto& ys = (2 * (i + 1) < grid.n + 1) ? ly : ry;
        xs.push_back(std::log(d));
        ys.push_back(std::log(u[i]));
    }
    if (lx.size() < 6 || rx.size() < 6) {
        throw std::invalid_argument("fit_boundary_exponent: fewer than 6 nodes in the window, refine grid");
    }
    const LineFit left = least_squares(lx, ly);
    const LineFit right = least_squares(rx, ry);
    ExponentFit out;
    out.alpha = 0.5 * (left.slope + right.slope);
    out.r2 = std::min(left.r2, right.r2);
    out.nodes_per_side = static_cast<int>(std::min(lx.size(), rx.size()));
    return out;
}

double holder_seminorm(const Field& u, const Grid& grid, double gamma, HolderOptions options) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("holder_seminorm: gamma must lie in (0,1]");
    if (u.size() != grid.n) throw std::invalid_argument("holder_seminorm: dimension mismatch");
    const int n = grid.n;
    double best = 0.0;
    for (int stride = 1; stride <= std::min(options.stride_cap, n - 1); ++stride) {
        const double denom = std::pow(stride * grid.h, gamma);
        for (int i = 0; i + stride < n; ++i) {
            best = std::max(best, std::abs(u[i] - u[i + stride]) / denom);
        }
    }
    if (options.include_exterior) {
        for (int i = 0; i < n; ++i) {
            const double dl = (i + 1) * grid.h;
            const double dr = (n - i) * grid.h;
            best = std::max(best, std::abs(u[i]) / std::pow(dl, gamma));
            best = std::max(best, std::abs(u[i]) / std::pow(dr, gamma));
        }
    }
    return best;
}

double hs_mass(const Field& u, const Grid& grid, const ProblemSpec& spec) {
    if (u.size() != grid.n) throw std::invalid_argument("hs_mass: dimension mismatch");
    const Field k = weight_field(spec, grid);
    double mass = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        if (!(u[i] > 0.0)) throw std::invalid_argument("hs_mass: u must be positive in the interior");
        mass += k[i] * std::pow(u[i], 1.0 - spec.delta);
    }
    return mass * grid.h;
}

MassReport hs_membership_indicator(const std::vector<std::pair<Grid, Field>>& refinements,
                                   const ProblemSpec& spec) {
    if (refinements.size() < 3) {
        throw std::invalid_argument("hs_membership_indicator: need the base grid and two refinements");
    }
    MassReport r;
    for (const auto& [grid, u] : refinements) r.masses.push_back(hs_mass(u, grid, spec));
    r.growth = r.masses.back() / r.masses.front();
    r.verdict = r.growth > 1.5 ? MassVerdict::Diverging : MassVerdict::Finite;
    return r;
}

}  // namespace fracfold
