#pragma once

// Internal: Newton on maps of the form
//   u -> (A + shift) u - w (u + eps)^{-delta} - c f(u) - rhs.
// Every map of this family is concave with a Z-matrix Jacobian, so Newton
// started at a subsolution increases monotonically towards the nearest solution.

#include <limits>

#include "fracfold/fracops.hpp"
#include "fracfold/problem.hpp"

namespace fracfold::detail {

struct System {
    const Matrix* a = nullptr;
    Field weight;
    double delta = 0.0;
    double eps = 0.0;
    double shift = 0.0;
    Field rhs;  // empty means zero
    const Nonlinearity* f = nullptr;
    double f_scale = 0.0;
};

Field residual(const System& sys, const Field& u);
Matrix jacobian(const System& sys, const Field& u);

/// Attainable residual given the magnitude of the terms in double precision.
double roundoff_floor(const System& sys, const Field& u);

enum class Mode { Monotone, Damped };
enum class Status { Converged, Cap, Indefinite, Blowup, Decrease, Stalled };

struct Outcome {
    Field u;
    double residual = 0.0;
    int iterations = 0;
    Status status = Status::Cap;
};

Outcome newton(const System& sys, Field u, double tol, int cap, Mode mode,
               double blowup = std::numeric_limits<double>::infinity());

const char* describe(Status s);

}  // namespace fracfold::detail
