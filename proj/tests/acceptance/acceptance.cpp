// Runs the full verification battery and folds the records into the twelve
// acceptance criteria, one PASS/FAIL line each. Record-level detail follows.
#include <cstdio>
#include <string>
#include <vector>

#include "fracfold/config.hpp"
#include "fracfold/io.hpp"
#include "fracfold/verify.hpp"

using namespace fracfold;

int main(int argc, char** argv) {
    RunConfig cfg;
    if (argc > 1) cfg = load_config(argv[1]);
    cfg.suite = "all";

    const VerificationReport report = verify_suite(cfg);

    struct Criterion {
        const char* title;
        std::vector<std::string> tags;
    };
    const Criterion criteria[] = {
        {"discretization oracle (Getoor, n=1024)", {"operator-normalization"}},
        {"M-matrix and discrete comparison", {"comparison-principle"}},
        {"pure singular scaling identity", {"singular-scaling"}},
        {"boundary rate regimes", {"boundary-rates"}},
        {"H^s energy threshold", {"energy-threshold"}},
        {"Holder regimes", {"holder-regularity"}},
        {"minimal branch", {"minimal-branch"}},
        {"fold bending", {"fold-bending"}},
        {"multiplicity", {"multiplicity"}},
        {"asymptotic bifurcation at zero", {"asymptotic-bifurcation"}},
        {"derivative solves vs finite differences", {"derivative-solves"}},
        {"small lambda uniqueness", {"small-lambda-uniqueness"}},
    };

    int failed = 0, index = 0;
    for (const auto& c : criteria) {
        ++index;
        int total = 0, passed = 0;
        for (const auto& r : report.records) {
            for (const auto& t : c.tags) {
                if (r.tag != t) continue;
                ++total;
                passed += r.pass ? 1 : 0;
            }
        }
        const bool ok = total > 0 && passed == total;
        failed += ok ? 0 : 1;
        std::printf("%s  %2d  %-42s %d/%d records\n", ok ? "PASS" : "FAIL", index, c.title, passed, total);
    }
    std::printf("\n%d of 12 criteria pass (seed %llu)\n\n", 12 - failed, static_cast<unsigned long long>(report.seed));
    std::fputs(report_table(report).c_str(), stdout);

    const std::string path = output_directory(cfg) + "/acceptance.json";
    write_atomic(path, report_json(report).dump(2) + "\n");
    std::printf("\n%s: verification report\n", path.c_str());
    return failed == 0 ? 0 : 1;
}
