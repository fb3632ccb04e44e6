#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbl/params.hpp"

namespace hbl {

inline constexpr const char* kVersion = "hbl 0.1.0";

// One experiment invocation. Everything an output depends on lives here and
// is echoed into the CSV header comment, except the thread count: results
// are independent of it by the counter-addressed path contract.
struct RunConfig {
    std::string subcommand; // rates|barrier|bridge-check|cc|decompose|moments|selftest
    std::string preset = "high";
    std::optional<HestonParams> params; // overrides the preset when set
    std::vector<std::int64_t> steps;    // empty = subcommand default
    std::int64_t steps_fine = 4096;
    std::int64_t paths = 100000;
    int refine = 10;
    std::uint64_t seed = 1;
    int threads = 0; // 0 keeps the runtime default
    std::string out; // output file; empty = the stream passed to run()
    std::string scheme = "euler"; // euler|reference, trajectory dumps only
    std::string dump_paths;       // when set: fine-grid trajectory CSV target
    bool quick = false;
    bool full = false;
};

HestonParams resolve_params(const RunConfig& cfg);

// key=value rendering of the config for the CSV self-description.
std::string describe_config(const RunConfig& cfg);

// Executes the subcommand and writes its CSV (or the selftest table).
// Returns 0 on success, 1 on domain/regime violations (message on `err`),
// 2 on configs that cannot be run at all.
int run(const RunConfig& cfg, std::ostream& fallback_out, std::ostream& err);

} // namespace hbl
