#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace framegate {

struct SuiteOptions {
    std::uint64_t seed = 20240611;
    /// Sampled-mode agreement: Bloch-map error bound, copies, runs and the
    /// fraction of runs that must stay under the bound.
    double sampled_bloch_bound = 0.005;
    std::uint64_t sampled_copies = 1000000;
    int sampled_runs = 100;
    double sampled_pass_fraction = 0.99;
    /// Mutated frames fed to the decoder.
    int fuzz_frames = 100000;
    /// Criterion 11 forks a Bob process per scenario family.
    bool two_process = true;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0;   ///< worst defect (or failure fraction) observed
    double threshold = 0.0;  ///< bound the defect was held to
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int criterion_count = 12;

/// Short name of criterion `id` (1-based).
std::string criterion_name(int id);

CriterionResult run_criterion(int id, const SuiteOptions& options);

struct SuiteReport {
    std::vector<CriterionResult> results;
    [[nodiscard]] bool all_pass() const;
};

SuiteReport run_suite(const SuiteOptions& options);

}  // namespace framegate
