#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace patchlab::verify {

struct Check {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured
    double threshold = 0.0;  // gate (direction depends on the check)
};

struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool all_pass() const;
    std::string to_csv() const;    // machine readable
    std::string to_text() const;   // one pass/fail line per check
};

std::vector<std::string> suite_names();

/// Runs one invariant battery ("lp", "extension", "biot-savart", "patch",
/// "dynamics", "multiplier").  Throws std::invalid_argument for unknown
/// suites.  fast trims corpus sizes and grid resolutions.
SuiteResult run_suite(const std::string& name, bool fast = false, std::uint64_t seed = 1);

}  // namespace patchlab::verify
