#pragma once

#include "fracfold/fracops.hpp"
#include "fracfold/singular.hpp"

namespace fracfold {

/// base + diag(lambda delta K u^{-delta-1} - lambda f'(u)).
struct LinearizedOperator {
    const NonlocalOperator* base = nullptr;
    Field potential;
    Matrix matrix;
};

LinearizedOperator linearize(double lambda, const Field& u, const SingularProblem& problem,
                             bool include_f = true);

struct SpectralReport {
    EigenPair principal;
    double second = 0.0;
    double relative_gap = 0.0;  // (mu2 - mu1) / |mu1|
};

/// Principal eigenpair of the linearization around u, with the gap to the second eigenvalue.
SpectralReport lambda1(double lambda, const Field& u, const SingularProblem& problem);

/// v with (base + diag(lambda delta K u^{-delta-1})) v = phi, u = A(lambda, h).
Field d2A_directional(double lambda, const Field& u, const Field& phi, const SingularProblem& problem);

struct SensitivityBundle {
    Field u;
    Field w1;
    Field w11;
    Field w12;
    Field w22;
    Field v;      // d2A(phi)
    Field v_psi;  // d2A(psi)
    double max_residual = 0.0;
};

/// Derivatives of (lambda, h) -> A(lambda, h) at u = A(lambda, h):
///   P w1  = K u^{-delta}
///   P w11 = lambda delta (delta+1) K u^{-delta-2} w1^2 - 2 delta K u^{-delta-1} w1
///   P w12 = lambda delta (delta+1) K u^{-delta-2} w1 v - delta K u^{-delta-1} v
///   P w22 = lambda delta (delta+1) K u^{-delta-2} v v_psi
/// with P = base + diag(lambda delta K u^{-delta-1}), P v = phi, P v_psi = psi.
SensitivityBundle sensitivity_bundle(double lambda, const Field& h, const Field& phi, const Field& psi,
                                     const SingularProblem& problem, double tol);

/// Smallest singular value of I - P^{-1} diag(lambda f'(u)), by power iteration on
/// the inverse. Zero when the linearization is exactly singular.
double fredholm_monitor(double lambda, const Field& u, const SingularProblem& problem,
                        double tol = 1e-10, int max_iterations = 500);

}  // namespace fracfold
