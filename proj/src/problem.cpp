#include "fracfold/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace fracfold {

Nonlinearity Nonlinearity::none() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::power(double p, double coefficient) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("power nonlinearity needs p > 1");
    if (!(coefficient > 0.0)) throw std::invalid_argument("power nonlinearity needs a positive coefficient");
    Nonlinearity n;
    n.kind_ = Kind::Power;
    n.p_ = p;
    n.coefficient_ = coefficient;
    // c t^p: f(0) = 0, t f'/f = p > 1 (f3), f ~ c t^p (f4), t f'/f <= q = p (f5);
    // t^{-delta} + c t^p is strictly convex (f2).
    n.compliance_ = {true, true, true, true, true};
    return n;
}

Nonlinearity Nonlinearity::custom(Scalar f, Scalar df, Scalar d2f, Compliance declared,
                                  double growth_exponent) {
    if (!f || !df || !d2f) throw std::invalid_argument("custom nonlinearity needs f, f' and f''");
    Nonlinearity n;
    n.kind_ = Kind::Custom;
    n.p_ = growth_exponent;
    n.coefficient_ = 1.0;
    n.compliance_ = declared;
    n.f_ = std::move(f);
    n.df_ = std::move(df);
    n.d2f_ = std::move(d2f);
    return n;
}

double Nonlinearity::value(double t) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Power: return coefficient_ * std::pow(t, p_);
        case Kind::Custom: return f_(t);
    }
    return 0.0;
}

double Nonlinearity::derivative(double t) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Power: return coefficient_ * p_ * std::pow(t, p_ - 1.0);
        case Kind::Custom: return df_(t);
    }
    return 0.0;
}

double Nonlinearity::second_derivative(double t) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Power: return coefficient_ * p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
        case Kind::Custom: return d2f_(t);
    }
    return 0.0;
}

Field Nonlinearity::value(const Field& u) const {
    return u.unaryExpr([this](double t) { return value(t); });
}

Field Nonlinearity::derivative(const Field& u) const {
    return u.unaryExpr([this](double t) { return derivative(t); });
}

Field Nonlinearity::second_derivative(const Field& u) const {
    return u.unaryExpr([this](double t) { return second_derivative(t); });
}

double Nonlinearity::max_derivative(double t_max) const {
    switch (kind_) {
        case Kind::None: return 0.0;
        case Kind::Power: return derivative(t_max);
        case Kind::Custom: {
            // No monotonicity assumed: sample the interval.
            double best = 0.0;
            constexpr int samples = 256;
            for (int i = 0; i <= samples; ++i) best = std::max(best, df_(t_max * i / samples));
            return best;
        }
    }
    return 0.0;
}

std::string to_string(Nonlinearity::Kind k) {
    switch (k) {
        case Nonlinearity::Kind::None: return "none";
        case Nonlinearity::Kind::Power: return "power";
        case Nonlinearity::Kind::Custom: return "custom";
    }
    return "unknown";
}

bool ProblemSpec::hs_flag() const { return 2.0 * beta + delta * (2.0 * s - 1.0) < 1.0 + 2.0 * s; }

HypothesisAudit audit(const ProblemSpec& spec, bool multiplicity) {
    if (!(spec.s > 0.0 && spec.s < 1.0)) throw std::invalid_argument("s must lie in (0,1)");
    if (!(spec.delta >= 0.0) || !std::isfinite(spec.delta)) throw std::invalid_argument("delta must be >= 0");
    if (!(spec.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(spec.beta < 2.0 * spec.s)) {
        throw std::invalid_argument("beta >= 2s: no classical solution exists in this regime");
    }
    if (!(spec.k_coeff > 0.0)) throw std::invalid_argument("K coefficient must be positive");
    if (!(spec.lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");

    HypothesisAudit a;
    a.compliance = spec.f.compliance();
    a.hs_flag = spec.hs_flag();
    const double p = spec.f.exponent();
    if (spec.f.kind() != Nonlinearity::Kind::None && spec.s < 0.5 && p > 0.0) {
        a.subcritical = p < (1.0 + 2.0 * spec.s) / (1.0 - 2.0 * spec.s);
    }
    if (multiplicity) {
        if (spec.f.kind() == Nonlinearity::Kind::None) {
            throw std::invalid_argument("multiplicity features need a superlinear nonlinearity");
        }
        if (!a.subcritical) throw std::invalid_argument("growth exponent is not subcritical");
    }
    return a;
}

Field weight_field(const ProblemSpec& spec, const Grid& grid) {
    return weight_k(grid, spec.beta, spec.k_coeff, spec.s);
}

Field source_term(const ProblemSpec& spec, const Field& k, double lambda, const Field& u) {
    Field out(u.size());
    for (int i = 0; i < u.size(); ++i) {
        out[i] = lambda * (k[i] * std::pow(u[i], -spec.delta) + spec.f.value(u[i]));
    }
    return out;
}

}  // namespace fracfold
