#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fracfold/continuation.hpp"
#include "fracfold/fracops.hpp"
#include "fracfold/problem.hpp"
#include "fracfold/singular.hpp"

namespace fracfold {

/// Everything a run needs. Text form is flat key = value lines under [section] headers;
/// '#' starts a comment. Every key has a default, so an empty file is a valid config.
struct RunConfig {
    // [problem]
    double s = 0.4;
    double delta = 0.5;
    double beta = 0.0;
    double k_coeff = 1.0;
    double lambda = 1.0;
    double p = 2.0;  // 0 selects the pure singular problem
    double f_coeff = 1.0;

    // [grid]
    double half_width = 1.0;
    int n = 512;

    // [solver]
    double newton_tol = 1e-9;
    int newton_cap = 200;
    double eigen_tol = 1e-8;
    int eigen_cap = 500;
    double eps_initial = 1.0;
    double eps_ratio = 0.5;
    double eps_stop = 1e-6;
    int eps_levels = 60;
    int monotone_cap = 20000;

    // [continuation]
    double initial_step = 0.02;
    double min_step_ratio = 1e-6;
    double bracket_width = 1e-3;
    int max_points = 2000;
    double arclength_step = 0.01;
    double arclength_max_step = 1e3;
    int arclength_steps = 400;
    double growth_cap = 1e3;
    double fold_window = 0.03;

    // [output]
    std::string out_dir = "out";
    bool dump_matrix = false;

    // [verify]
    std::string suite = "all";
    std::uint64_t seed = 20240601;
    int uniqueness_trials = 10;
    bool check_operator = true;
    bool check_rates = true;
    bool check_scaling = true;
    bool check_threshold = true;
    bool check_holder = true;
    bool check_branch = true;
    bool check_fold = true;
    bool check_multiplicity = true;
    bool check_asymptotic = true;
    bool check_sensitivity = true;
    bool check_uniqueness = true;

    ProblemSpec problem() const;
    Grid grid() const;
    SolverSettings solver() const;
    ContinuationPolicy continuation() const;

    bool operator==(const RunConfig&) const = default;
};

/// Throws std::invalid_argument naming the line on unknown keys or bad values.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Sets one field by its "section.key" name; used for command-line overrides too.
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

}  // namespace fracfold
