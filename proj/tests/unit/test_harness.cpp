#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracfold/config.hpp"
#include "fracfold/io.hpp"
#include "fracfold/verify.hpp"

using namespace fracfold;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fracfold_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    std::istringstream in("");
    CHECK(parse_config(in) == RunConfig{});
}

TEST_CASE("config round trip is the identity") {
    RunConfig cfg;
    cfg.s = 0.3;
    cfg.delta = 1.0 / 3.0;
    cfg.p = 0.0;
    cfg.n = 777;
    cfg.out_dir = "results/a";
    cfg.seed = 18446744073709551615ull;
    cfg.check_holder = false;
    cfg.growth_cap = 1e-300;
    const std::string text = serialize_config(cfg);
    std::istringstream in(text);
    const RunConfig back = parse_config(in);
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("config parser reports the offending line") {
    std::istringstream comment("# header\n[problem]\ns = 0.25  # trailing\n\n[grid]\nn=64\n");
    const RunConfig cfg = parse_config(comment);
    CHECK(cfg.s == 0.25);
    CHECK(cfg.n == 64);

    std::istringstream unknown("[problem]\nsigma = 1\n");
    try {
        parse_config(unknown);
        FAIL("accepted an unknown key");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream bad("[grid]\nn = 12x\n");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
    std::istringstream orphan("n = 12\n");
    CHECK_THROWS_AS(parse_config(orphan), std::invalid_argument);
    CHECK_THROWS(load_config("/nonexistent/fracfold.cfg"));
}

TEST_CASE("command line style overrides") {
    RunConfig cfg;
    set_config_value(cfg, "problem", "beta", "0.2");
    set_config_value(cfg, "verify", "check_fold", "false");
    CHECK(cfg.beta == 0.2);
    CHECK_FALSE(cfg.check_fold);
    CHECK_THROWS_AS(set_config_value(cfg, "grid", "n", "many"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(cfg, "grid", "n", "99999999999"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_value(cfg, "verify", "seed", "-3"), std::invalid_argument);
}

TEST_CASE("config feeds the module settings") {
    RunConfig cfg;
    cfg.p = 0.0;
    cfg.eps_ratio = 0.25;
    cfg.arclength_steps = 17;
    CHECK(cfg.problem().f.kind() == Nonlinearity::Kind::None);
    CHECK(cfg.solver().schedule.ratio == 0.25);
    CHECK(cfg.continuation().arclength_steps == 17);
    CHECK(cfg.grid().n == cfg.n);
}

TEST_CASE("atomic writes replace files and create directories") {
    const fs::path dir = scratch("atomic");
    const std::string path = (dir / "sub" / "x.txt").string();
    write_atomic(path, "one\n");
    write_atomic(path, "two\n");
    CHECK(slurp(path) == "two\n");
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir / "sub")) files += e.is_regular_file() ? 1 : 0;
    CHECK(files == 1);
    fs::remove_all(dir);
}

TEST_CASE("output directory honours the environment") {
    RunConfig cfg;
    cfg.out_dir = "configured";
    unsetenv("FRACFOLD_OUT");
    CHECK(output_directory(cfg) == "configured");
    setenv("FRACFOLD_OUT", "from_env", 1);
    CHECK(output_directory(cfg) == "from_env");
    unsetenv("FRACFOLD_OUT");
}

TEST_CASE("solution JSON carries the documented fields") {
    const NonlocalOperator op(build_grid(1.0, 64), 0.4);
    ProblemSpec spec;
    spec.delta = 3.0;
    const SolutionField u = solve_pure_singular(spec, op);
    const auto j = solution_json(u);
    for (const char* key : {"grid", "params", "values", "residual", "cone_norm", "fitted_exponent"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["values"].size() == 64);
    CHECK(j["grid"]["n"] == 64);
    CHECK_THROWS_AS(boundary_profile_data(SolutionField{}), std::invalid_argument);
}

TEST_CASE("verification suites") {
    CHECK(suite_names().size() == 11);
    RunConfig cfg;
    cfg.suite = "no-such-suite";
    CHECK_THROWS_AS(verify_suite(cfg), std::invalid_argument);

    cfg.suite = "scaling";
    cfg.n = 64;
    const VerificationReport r = verify_suite(cfg);
    CHECK(r.records.size() == 6);
    CHECK(r.all_passed());
    for (const auto& x : r.records) CHECK(x.tag == "singular-scaling");
    const auto j = report_json(r);
    CHECK(j["passed"] == true);
    CHECK(j["records"].size() == 6);
    CHECK(report_table(r).find("PASS") == 0);
    CHECK_FALSE(VerificationReport{}.all_passed());
}

TEST_CASE("identical configs give identical artifacts") {
    RunConfig cfg;
    cfg.n = 64;
    cfg.suite = "scaling";
    const auto a = report_json(verify_suite(cfg)).dump();
    const auto b = report_json(verify_suite(cfg)).dump();
    CHECK(a == b);
}
