#include "fracfold/io.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fracfold {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string output_directory(const RunConfig& cfg) {
    if (const char* env = std::getenv("FRACFOLD_OUT"); env && *env) return env;
    return cfg.out_dir;
}

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    // Unique per writer so concurrent records never share a temporary.
    static std::atomic<unsigned> counter{0};
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "." +
           std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

nlohmann::json solution_json(const SolutionField& u) {
    nlohmann::json j;
    j["grid"] = {{"L", u.grid.half_width}, {"n", u.grid.n}};
    j["params"] = {{"s", u.spec.s},
                   {"delta", u.spec.delta},
                   {"beta", u.spec.beta},
                   {"lambda", u.spec.lambda},
                   {"p", u.spec.f.kind() == Nonlinearity::Kind::None ? 0.0 : u.spec.f.exponent()}};
    j["values"] = std::vector<double>(u.values.data(), u.values.data() + u.values.size());
    j["residual"] = u.residual;
    j["cone_norm"] = u.norms.cone_norm;
    j["fitted_exponent"] = u.norms.fitted_exponent;
    return j;
}

std::string branch_csv(const Branch& b) {
    std::ostringstream out;
    out << "lambda,sup_norm,lambda1,monitor,arclength,residual,segment,fold\n";
    for (const auto& p : b.points) {
        out << num(p.lambda) << ',' << num(p.sup_norm) << ',' << num(p.lambda1) << ',' << num(p.monitor) << ','
            << num(p.arclength) << ',' << num(p.solution.residual) << ',' << to_string(p.segment) << ','
            << (p.fold ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string bifurcation_data(const Branch& b) {
    if (b.points.empty()) throw std::invalid_argument("refusing to export an empty branch");
    std::ostringstream out;
    out << "# lambda sup_norm\n";
    for (const auto& p : b.points) out << num(p.lambda) << ' ' << num(p.sup_norm) << '\n';
    return out.str();
}

std::string boundary_profile_data(const SolutionField& u) {
    if (u.values.size() == 0) throw std::invalid_argument("refusing to export an empty solution");
    std::ostringstream out;
    out << "# d u\n";
    for (int i = 0; i < (u.grid.n + 1) / 2; ++i) out << num(u.grid.distance(i)) << ' ' << num(u.values[i]) << '\n';
    return out.str();
}

std::string export_plot_data(const Branch& b, const std::string& dir, const std::string& stem) {
    const std::string path = (fs::path(dir) / (stem + "_diagram.dat")).string();
    write_atomic(path, bifurcation_data(b));
    return path;
}

std::string export_plot_data(const SolutionField& u, const std::string& dir, const std::string& stem) {
    const std::string path = (fs::path(dir) / (stem + "_profile.dat")).string();
    write_atomic(path, boundary_profile_data(u));
    return path;
}

}  // namespace fracfold
