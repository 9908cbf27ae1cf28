#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fusionlab {

struct VerifyOptions {
    int trials = 1000;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    /// Negates n_1 inside the sum-rule fixture. Negative control only.
    bool inject_fault = false;
};

struct SuiteResult {
    std::string name;
    long checks = 0;
    long failures = 0;
    std::string first_failure;
    double seconds = 0.0;

    bool passed() const { return failures == 0 && checks > 0; }
};

/// Suite names in run order.
std::vector<std::string> verify_suite_names();

/// Runs every suite; suite k draws from derive_seed(seed, k). Throws
/// OutOfRange when trials < 1.
std::vector<SuiteResult> run_verification(const VerifyOptions &opts);
/// Runs only the named suite; throws OutOfRange for an unknown name.
SuiteResult run_suite(const std::string &name, const VerifyOptions &opts);

}  // namespace fusionlab
