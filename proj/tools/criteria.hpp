// Acceptance checklist: every release-gating property of the library, one
// pass/fail result each, with the tolerances pinned in code. The checks
// compare solver output against independently derived closed forms, planted
// families and structural identities - never against the solver itself.
#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace vmf::tools {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;   // key measured numbers vs their bars
    double seconds = 0.0;
};

struct ValidateOptions {
    std::uint64_t seed = 12345;  // drives the random-density duality probes
    std::string only;            // substring filter on criterion names
    std::string plot_dir;        // when set, emit plot-data CSVs here
};

// id -> name, in execution order.
const std::vector<std::pair<int, std::string>>& criterion_table();

std::vector<CriterionResult> run_criteria(const ValidateOptions& opts = {});

} // namespace vmf::tools
