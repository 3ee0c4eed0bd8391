#pragma once

#include <string>
#include <vector>

namespace geomflow {

struct CriterionResult {
    std::string name;
    double target = 0.0;
    double estimate = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct SuiteOptions {
    bool quick = false;  // n_paths / 10, tolerances x 2
    int threads = 0;
    std::uint64_t seed = 42;
};

/// "paper-examples": the closed-form example criteria. "invariants": the
/// geometry/flow property bundle. Unknown names throw ConfigError listing
/// the available suites.
std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& opts);

std::vector<std::string> suite_names();

}  // namespace geomflow
