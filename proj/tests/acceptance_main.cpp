// Dedicated acceptance binary: runs every check of the verification suite
// at full scale and prints one pass/fail line per check. Non-zero exit on
// any failure. Pass --quick for the reduced tier.

#include <cstring>
#include <iostream>

#include "hbl/acceptance.hpp"

int main(int argc, char** argv) {
    hbl::acceptance::Options opt;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
            opt.seed = std::strtoull(argv[++i], nullptr, 10);
    }
    const auto results = hbl::acceptance::run_all(opt, &std::cout);
    const bool ok = hbl::acceptance::all_passed(results);
    std::cout << (ok ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << "\n";
    return ok ? 0 : 1;
}
