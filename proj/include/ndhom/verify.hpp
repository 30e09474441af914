#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ndhom {

struct CheckResult {
    std::string label;
    bool passed = false;
    double value = 0.0; ///< measured quantity
    double bound = 0.0; ///< tolerance it was held against
};

struct SuiteResult {
    std::string name;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<CheckResult> checks;

    bool passed() const;
    int failures() const;
};

/// thm11, lemma22, thm12, thm13, lemma31, lemma32, lemma33, density,
/// gallery_refs
std::vector<std::string> suite_names();

/// Run one named randomized/deterministic suite. `trials` applies to the
/// randomized ones; deterministic suites ignore it.
SuiteResult run_suite(const std::string& name, int trials, std::uint64_t seed);

} // namespace ndhom
