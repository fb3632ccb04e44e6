#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hbl/cli.hpp"
#include "hbl/csv.hpp"

using namespace hbl;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome exec(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

RunConfig small_cc() {
    RunConfig cfg;
    cfg.subcommand = "cc";
    cfg.steps = {4, 16};
    cfg.steps_fine = 256;
    cfg.paths = 2048;
    cfg.seed = 3;
    return cfg;
}

} // namespace

TEST_CASE("csv doubles render shortest round-trip") {
    CHECK(csv::format(0.25) == "0.25");
    CHECK(csv::format(1e-10) == "1e-10");
    CHECK(csv::format(static_cast<std::int64_t>(42)) == "42");
    CHECK(csv::format(true) == "1");
    CHECK(csv::format(false) == "0");
}

TEST_CASE("cc subcommand emits a self-describing table") {
    const auto res = exec(small_cc());
    CHECK(res.code == 0);
    CHECK(res.out.find("# hbl 0.1.0") == 0);
    CHECK(res.out.find("subcommand=cc") != std::string::npos);
    CHECK(res.out.find("seed=3") != std::string::npos);
    CHECK(res.out.find("N,M,estimate,std_error,target,pass") != std::string::npos);
    // two data rows, both passing at this scale
    CHECK(res.out.find("\n4,2048,") != std::string::npos);
    CHECK(res.out.find("\n16,2048,") != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
    const auto a = exec(small_cc());
    const auto b = exec(small_cc());
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    auto cfg = small_cc();
    cfg.threads = 2;
    const auto c = exec(cfg);
    CHECK(c.out == a.out); // thread count must not reach the bytes
}

TEST_CASE("regime violations exit 1 with a message") {
    RunConfig cfg;
    cfg.subcommand = "barrier";
    cfg.params = HestonParams(0.0, 3.0, 0.04, 0.3, 1.0, 0.0, 0.04, 1.0); // |rho| = 1
    cfg.steps = {16};
    cfg.steps_fine = 256;
    cfg.paths = 256;
    const auto res = exec(cfg);
    CHECK(res.code == 1);
    CHECK(res.err.find("rho") != std::string::npos);

    RunConfig dec;
    dec.subcommand = "decompose";
    dec.params = HestonParams(0.0, 0.5, 0.04, 0.31622776601683794, 0.5, 0.0, 0.04, 1.0); // nu = 0.4
    dec.steps = {16};
    dec.steps_fine = 256;
    dec.paths = 128;
    const auto r2 = exec(dec);
    CHECK(r2.code == 1);
    CHECK(r2.err.find("Feller") != std::string::npos);
}

TEST_CASE("unknown preset and unusable configs") {
    RunConfig cfg;
    cfg.subcommand = "moments";
    cfg.preset = "imaginary";
    cfg.paths = 128;
    cfg.steps_fine = 64;
    CHECK(exec(cfg).code == 1);

    RunConfig bad;
    bad.subcommand = "nonsense";
    CHECK(exec(bad).code == 2);

    RunConfig zero = small_cc();
    zero.paths = 0;
    CHECK(exec(zero).code == 2);
}

TEST_CASE("moments subcommand runs all four oracles") {
    RunConfig cfg;
    cfg.subcommand = "moments";
    cfg.preset = "high";
    cfg.paths = 4096;
    cfg.steps_fine = 128;
    cfg.seed = 11;
    const auto res = exec(cfg);
    CHECK(res.code == 0);
    CHECK(res.out.find("exact_mean") != std::string::npos);
    CHECK(res.out.find("exact_variance") != std::string::npos);
    CHECK(res.out.find("reference_mean") != std::string::npos);
    CHECK(res.out.find("reference_ks") != std::string::npos);
}

TEST_CASE("bridge-check emits the bracket columns") {
    RunConfig cfg;
    cfg.subcommand = "bridge-check";
    cfg.preset = "high";
    cfg.steps = {8};
    cfg.paths = 2000;
    cfg.refine = 6;
    cfg.seed = 12;
    const auto res = exec(cfg);
    CHECK(res.code == 0);
    CHECK(res.out.find("N,n,M,ks_stat,mean_abs_I,scaled_mean,lower_bound,upper_bound") !=
          std::string::npos);
    CHECK(res.out.find("0.25,0.3258") != std::string::npos);
}

TEST_CASE("decompose subcommand writes both sections") {
    RunConfig cfg;
    cfg.subcommand = "decompose";
    cfg.preset = "high";
    cfg.steps = {16, 32, 64, 128};
    cfg.steps_fine = 1024;
    cfg.paths = 512;
    cfg.seed = 13;
    const auto res = exec(cfg);
    CHECK(res.code == 0);
    CHECK(res.out.find("reconstruction_gap") != std::string::npos);
    CHECK(res.out.find("riemann_gap") != std::string::npos);
    CHECK(res.out.find("riemann_fit slope=") != std::string::npos);
}

TEST_CASE("rates can dump fine-grid trajectories of the selected scheme") {
    for (const char* scheme : {"euler", "reference"}) {
        RunConfig cfg;
        cfg.subcommand = "rates";
        cfg.preset = "high";
        cfg.steps = {8, 16, 32, 64};
        cfg.steps_fine = 64;
        cfg.paths = 256;
        cfg.seed = 14;
        cfg.scheme = scheme;
        cfg.dump_paths = std::string("hbl_test_dump_") + scheme + ".csv";
        const auto res = exec(cfg);
        CHECK(res.code == 0);
        std::ifstream dump(cfg.dump_paths);
        REQUIRE(dump.good());
        std::string line, all;
        std::size_t rows = 0;
        while (std::getline(dump, line)) {
            if (!line.empty() && line[0] != '#') ++rows;
            all += line + "\n";
        }
        CHECK(all.find("path_id,k,t_k,xhat,vhat") != std::string::npos);
        CHECK(all.find(std::string("scheme=") + scheme) != std::string::npos);
        CHECK(rows == 1 + 4 * 65); // header + 4 paths * (N_f + 1) knots
        std::remove(cfg.dump_paths.c_str());
    }
    RunConfig bad;
    bad.subcommand = "rates";
    bad.scheme = "milstein";
    CHECK(exec(bad).code == 2);
}

TEST_CASE("config description is stable and complete") {
    const auto cfg = small_cc();
    const std::string desc = describe_config(cfg);
    CHECK(desc.find("subcommand=cc") != std::string::npos);
    CHECK(desc.find("steps=4,16") != std::string::npos);
    CHECK(desc.find("steps_fine=256") != std::string::npos);
    CHECK(desc.find("paths=2048") != std::string::npos);
    CHECK(desc.find("threads") == std::string::npos); // results do not depend on it
}
