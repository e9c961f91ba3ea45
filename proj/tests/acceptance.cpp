// Runs the full acceptance checklist and prints one line per criterion.
// Exit status is nonzero when any criterion fails.
#include <cstdio>

#include "criteria.hpp"

int main() {
    auto results = vmf::tools::run_criteria({});
    bool all = !results.empty();
    for (const auto& r : results) {
        std::printf("criterion %2d %-4s %-48s (%.1f s)  %s\n", r.id,
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                    r.detail.c_str());
        all = all && r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILURES above");
    return all ? 0 : 1;
}
