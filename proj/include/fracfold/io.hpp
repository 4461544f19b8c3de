#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracfold/config.hpp"
#include "fracfold/continuation.hpp"
#include "fracfold/singular.hpp"

namespace fracfold {

/// The configured output directory, unless FRACFOLD_OUT is set.
std::string output_directory(const RunConfig& cfg);

/// Writes through a temporary file in the same directory and renames it into place.
/// Creates missing parent directories.
void write_atomic(const std::string& path, const std::string& content);

nlohmann::json solution_json(const SolutionField& u);

/// Header lambda,sup_norm,lambda1,monitor,arclength,residual,segment,fold.
std::string branch_csv(const Branch& b);

/// Two columns: lambda, sup norm. Throws std::invalid_argument on an empty branch.
std::string bifurcation_data(const Branch& b);

/// Two columns d, u over the left half of the grid, for log-log plots of the boundary layer.
std::string boundary_profile_data(const SolutionField& u);

/// Writes <stem>_diagram.dat (branch) and returns the written path.
std::string export_plot_data(const Branch& b, const std::string& dir, const std::string& stem);
/// Writes <stem>_profile.dat and returns the written path.
std::string export_plot_data(const SolutionField& u, const std::string& dir, const std::string& stem);

}  // namespace fracfold
