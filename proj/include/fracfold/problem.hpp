#pragma once

#include <functional>
#include <string>

#include "fracfold/fracops.hpp"
#include "fracfold/weights.hpp"

namespace fracfold {

/// The superlinear term f of the equation.
class Nonlinearity {
public:
    enum class Kind { None, Power, Custom };

    /// Declared compliance with the structural hypotheses on f.
    struct Compliance {
        bool positive_c2_zero_at_origin = false;  // (f1)
        bool strictly_convex_total = false;       // (f2)
        bool superlinear = false;                 // (f3)
        bool power_asymptotic = false;            // (f4)
        bool bounded_growth_ratio = false;        // (f5)
    };

    using Scalar = std::function<double(double)>;

    static Nonlinearity none();
    /// f(t) = coefficient * t^p, p > 1.
    static Nonlinearity power(double p, double coefficient = 1.0);
    static Nonlinearity custom(Scalar f, Scalar df, Scalar d2f, Compliance declared,
                               double growth_exponent = 0.0);

    Kind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return p_; }
    double coefficient() const noexcept { return coefficient_; }
    const Compliance& compliance() const noexcept { return compliance_; }

    double value(double t) const;
    double derivative(double t) const;
    double second_derivative(double t) const;

    Field value(const Field& u) const;
    Field derivative(const Field& u) const;
    Field second_derivative(const Field& u) const;

    /// Max of f' over [0, t_max]; f' is nondecreasing under (f2)-(f3).
    double max_derivative(double t_max) const;

private:
    Kind kind_ = Kind::None;
    double p_ = 0.0;
    double coefficient_ = 0.0;
    Compliance compliance_;
    Scalar f_, df_, d2f_;
};

std::string to_string(Nonlinearity::Kind k);

/// Continuous parameters of (-Delta)^s u = lambda (K u^{-delta} + f(u)),
/// K = k_coeff * d^{-beta}.
struct ProblemSpec {
    double s = 0.4;
    double delta = 0.5;
    double beta = 0.0;
    double k_coeff = 1.0;
    double lambda = 1.0;
    Nonlinearity f = Nonlinearity::none();

    Regime regime() const { return classify_regime(s, delta, beta); }
    /// 2 beta + delta (2s - 1) < 1 + 2s.
    bool hs_flag() const;
};

struct HypothesisAudit {
    Nonlinearity::Compliance compliance;
    bool subcritical = true;  // p < (1+2s)/(1-2s) when s < 1/2
    bool hs_flag = false;
};

/// Checks parameter ranges and the hypotheses on f. Throws std::invalid_argument
/// on range violations, and on supercritical growth when multiplicity features
/// are requested.
HypothesisAudit audit(const ProblemSpec& spec, bool multiplicity = false);

/// K at the grid nodes.
Field weight_field(const ProblemSpec& spec, const Grid& grid);

/// Right-hand side lambda (K u^{-delta} + f(u)).
Field source_term(const ProblemSpec& spec, const Field& k, double lambda, const Field& u);

}  // namespace fracfold
