#include "fracfold/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fracfold {

namespace {

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters in number '" + v + "'");
    return x;
}

long long to_int(const std::string& v) {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters in integer '" + v + "'");
    return x;
}

std::uint64_t to_seed(const std::string& v) {
    if (v.empty() || v[0] == '-') throw std::invalid_argument("seed must be a non-negative integer");
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters in integer '" + v + "'");
    return x;
}

template <typename T>
T narrow(long long x) {
    if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
        throw std::invalid_argument("integer " + std::to_string(x) + " out of range");
    }
    return static_cast<T>(x);
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::string from_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Entry {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define REAL(sec, name) \
    Entry{sec, #name, [](RunConfig& c, const std::string& v) { c.name = to_double(v); }, \
          [](const RunConfig& c) { return from_double(c.name); }}
#define INT(sec, name) \
    Entry{sec, #name, [](RunConfig& c, const std::string& v) { c.name = narrow<decltype(c.name)>(to_int(v)); }, \
          [](const RunConfig& c) { return std::to_string(c.name); }}
#define FLAG(sec, name) \
    Entry{sec, #name, [](RunConfig& c, const std::string& v) { c.name = to_bool(v); }, \
          [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}
#define TEXT(sec, name) \
    Entry{sec, #name, [](RunConfig& c, const std::string& v) { c.name = v; }, \
          [](const RunConfig& c) { return c.name; }}

const std::vector<Entry>& fields() {
    static const std::vector<Entry> table = {
        REAL("problem", s), REAL("problem", delta), REAL("problem", beta), REAL("problem", k_coeff),
        REAL("problem", lambda), REAL("problem", p), REAL("problem", f_coeff),
        REAL("grid", half_width), INT("grid", n),
        REAL("solver", newton_tol), INT("solver", newton_cap), REAL("solver", eigen_tol), INT("solver", eigen_cap),
        REAL("solver", eps_initial), REAL("solver", eps_ratio), REAL("solver", eps_stop), INT("solver", eps_levels),
        INT("solver", monotone_cap),
        REAL("continuation", initial_step), REAL("continuation", min_step_ratio),
        REAL("continuation", bracket_width), INT("continuation", max_points),
        REAL("continuation", arclength_step), REAL("continuation", arclength_max_step),
        INT("continuation", arclength_steps), REAL("continuation", growth_cap), REAL("continuation", fold_window),
        TEXT("output", out_dir), FLAG("output", dump_matrix),
        TEXT("verify", suite), Entry{"verify", "seed", [](RunConfig& c, const std::string& v) { c.seed = to_seed(v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }}, INT("verify", uniqueness_trials),
        FLAG("verify", check_operator), FLAG("verify", check_rates), FLAG("verify", check_scaling),
        FLAG("verify", check_threshold), FLAG("verify", check_holder), FLAG("verify", check_branch),
        FLAG("verify", check_fold), FLAG("verify", check_multiplicity), FLAG("verify", check_asymptotic),
        FLAG("verify", check_sensitivity), FLAG("verify", check_uniqueness),
    };
    return table;
}

#undef REAL
#undef INT
#undef FLAG
#undef TEXT

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
    for (const auto& f : fields()) {
        if (section == f.section && key == f.key) {
            try {
                f.set(cfg, value);
            } catch (const std::logic_error& e) {
                throw std::invalid_argument(section + "." + key + ": " + e.what());
            }
            return;
        }
    }
    throw std::invalid_argument("unknown config key " + section + "." + key);
}

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "config line " + std::to_string(number) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw std::invalid_argument(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + "expected key = value");
        if (section.empty()) throw std::invalid_argument(where + "key outside any section");
        try {
            set_config_value(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path);
    return parse_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& f : fields()) {
        if (section != f.section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(cfg) << '\n';
    }
    return out.str();
}

ProblemSpec RunConfig::problem() const {
    ProblemSpec spec;
    spec.s = s;
    spec.delta = delta;
    spec.beta = beta;
    spec.k_coeff = k_coeff;
    spec.lambda = lambda;
    spec.f = p > 0.0 ? Nonlinearity::power(p, f_coeff) : Nonlinearity::none();
    return spec;
}

Grid RunConfig::grid() const { return build_grid(half_width, n); }

SolverSettings RunConfig::solver() const {
    SolverSettings st;
    st.newton_tol = newton_tol;
    st.newton_cap = newton_cap;
    st.eigen_tol = eigen_tol;
    st.eigen_cap = eigen_cap;
    st.monotone_cap = monotone_cap;
    st.schedule.initial = eps_initial;
    st.schedule.ratio = eps_ratio;
    st.schedule.stop = eps_stop;
    st.schedule.max_levels = eps_levels;
    return st;
}

ContinuationPolicy RunConfig::continuation() const {
    ContinuationPolicy pol;
    pol.initial_step = initial_step;
    pol.min_step_ratio = min_step_ratio;
    pol.bracket_width = bracket_width;
    pol.max_points = max_points;
    pol.arclength_step = arclength_step;
    pol.arclength_max_step = arclength_max_step;
    pol.arclength_steps = arclength_steps;
    pol.growth_cap = growth_cap;
    pol.fold_window = fold_window;
    return pol;
}

}  // namespace fracfold
