// The acceptance suite: every primary claim the artifact makes about itself,
// runnable both as the `validate` subcommand and as the ctest acceptance
// binary. One CriterionResult per criterion, tolerances pinned in the
// implementation.
#pragma once
#include <string>
#include <vector>

namespace vmf {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;   // measured numbers vs thresholds
    double seconds = 0.0;
};

struct ValidateOptions {
    std::string only;          // substring filter on criterion names, empty = all
    int threads = 1;
    unsigned long long seed = 12345;
    std::string emit_dir;      // when set, write plot-data CSVs here
};

std::vector<CriterionResult> run_acceptance(const ValidateOptions& opts = {});

} // namespace vmf
