#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracfold/config.hpp"

namespace fracfold {

struct VerificationRecord {
    std::string name;
    std::string tag;  // the claim being replayed
    std::string params;
    std::string expected;
    double measured = 0.0;
    std::string tolerance;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::vector<VerificationRecord> records;
    std::uint64_t seed = 0;

    bool all_passed() const;
};

/// Names accepted by RunConfig::suite besides "all".
const std::vector<std::string>& suite_names();

/// Runs the selected suite (or every enabled one for "all"). Module errors become failed records.
VerificationReport verify_suite(const RunConfig& cfg);

nlohmann::json report_json(const VerificationReport& r);
std::string report_table(const VerificationReport& r);

}  // namespace fracfold
