#pragma once

#include <map>
#include <string>
#include <vector>

#include "fracfold/fracops.hpp"

namespace fracfold {

struct ProblemSpec;

/// Boundary regime of the pure singular problem, by the sign of beta/s + delta - 1.
enum class Regime { Sub, Critical, Super };

std::string to_string(Regime r);

/// Exact comparison of beta/s + delta against 1, with a 1e-12 band for CRITICAL.
Regime classify_regime(double s, double delta, double beta);

/// Boundary exponent the regime predicts for solutions: s below and at the
/// critical line (up to the log factor), (2s - beta)/(delta + 1) above it.
double predicted_exponent(double s, double delta, double beta);

/// Weight phi_{delta,beta} built from the sup-normalized principal eigenfunction.
struct WeightProfile {
    Regime regime = Regime::Sub;
    double s = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    Field values;
    Field reference;  // phi_{1,s}
};

struct NormReport {
    double cone_norm = 0.0;   // sup |u| / phi
    double cone_lower = 0.0;  // inf u / phi
    double fitted_exponent = 0.0;
    double fit_r2 = 0.0;
    std::map<double, double> holder;  // gamma -> seminorm estimate
};

struct ExponentFit {
    double alpha = 0.0;
    double r2 = 0.0;
    int nodes_per_side = 0;
};

Field distance_field(const Grid& grid);

/// K(x_i) = coefficient * d(x_i)^{-beta}. Rejects beta outside [0, 2s).
Field weight_k(const Grid& grid, double beta, double coefficient, double s);

WeightProfile build_weight_profile(const Field& phi1s, double s, double delta, double beta);

NormReport cone_norms(const Field& u, const WeightProfile& w);

/// Log-log least squares of u against d over d in [2h, window*L], averaged
/// over the two boundary sides. Needs at least 6 nodes per side.
ExponentFit fit_boundary_exponent(const Field& u, const Grid& grid, double window = 0.15);

struct HolderOptions {
    int stride_cap = 64;
    /// Also pair every node with the two endpoints, where the field is zero.
    bool include_exterior = true;
};

double holder_seminorm(const Field& u, const Grid& grid, double gamma, HolderOptions options = {});

enum class MassVerdict { Finite, Diverging };

std::string to_string(MassVerdict v);

struct MassReport {
    std::vector<double> masses;  // one per refinement level
    double growth = 0.0;         // last / first
    MassVerdict verdict = MassVerdict::Finite;
};

/// Trapezoid mass of K u^{1-delta} over the interior nodes (zero at the endpoints).
double hs_mass(const Field& u, const Grid& grid, const ProblemSpec& spec);

/// Verdict from a sequence of solutions on successively halved grids: the
/// mass ratio across two refinements above 1.5 means divergence.
MassReport hs_membership_indicator(const std::vector<std::pair<Grid, Field>>& refinements,
                                   const ProblemSpec& spec);

}  // namespace fracfold
