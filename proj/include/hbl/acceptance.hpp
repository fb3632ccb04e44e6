#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hbl::acceptance {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    bool quick = false; // smaller ensembles, KS thresholds rescaled to match
    std::uint64_t seed = 1;
};

// Runs the whole verification suite (nine checks). Expensive coupled runs
// are shared between the checks that need them. `progress`, when non-null,
// receives one line per finished check.
std::vector<CheckResult> run_all(const Options& opt, std::ostream* progress);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace hbl::acceptance
