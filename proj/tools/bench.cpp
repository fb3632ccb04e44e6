// Benchmark of the OpenMP path kernels against the serial reference
// implementation. The two must agree bit-for-bit; this target reports the
// throughput gap.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "hbl/error_lab.hpp"
#include "hbl/parallel.hpp"
#include "hbl/params.hpp"
#include "hbl/paths.hpp"
#include "hbl/schemes.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <class F>
double time_of(F&& fn) {
    const auto t0 = clock_type::now();
    fn();
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <class Body>
void run_case(const char* name, std::int64_t m, double unit_per_path, const char* unit,
              Body&& body) {
    std::vector<double> out(static_cast<std::size_t>(m));
    bool equal = true;
    const double t_serial = time_of([&] { hbl::par::serial_for(m, [&](std::int64_t j) { out[j] = body(j); }); });
    std::vector<double> ref = out;
    const double t_parallel =
        time_of([&] { hbl::par::parallel_for(m, [&](std::int64_t j) { out[j] = body(j); }); });
    for (std::int64_t j = 0; j < m; ++j)
        if (out[j] != ref[j]) equal = false;
    const double total = unit_per_path * static_cast<double>(m);
    std::printf("%-28s serial %8.2f %s/s   openmp %8.2f %s/s   speedup %.2fx   bitwise %s\n", name,
                total / t_serial / 1e6, unit, total / t_parallel / 1e6, unit,
                t_serial / t_parallel, equal ? "equal" : "DIFFER");
}

} // namespace

int main() {
    const hbl::HestonParams p = hbl::preset_params("high");
    const std::int64_t n_f = 4096;
    const hbl::TimeGrid fine(p.T, n_f);
    std::printf("threads available: %d\n", hbl::par::max_threads());

    run_case("path generation", 2000, 2.0 * static_cast<double>(n_f), "Mvariate", [&](std::int64_t j) {
        const auto b = hbl::sample_path(fine, 1, static_cast<std::uint64_t>(j));
        return b.dW.back() + b.dB.back();
    });

    run_case("full-truncation euler", 2000, static_cast<double>(n_f), "Mstep", [&](std::int64_t j) {
        const auto b = hbl::sample_path(fine, 1, static_cast<std::uint64_t>(j));
        const auto t = hbl::run_euler(p, fine, b.dW, b.dB);
        return t.xhat.back();
    });

    run_case("drift-implicit reference", 2000, static_cast<double>(n_f), "Mstep", [&](std::int64_t j) {
        const auto b = hbl::sample_path(fine, 1, static_cast<std::uint64_t>(j));
        const auto t = hbl::run_reference(p, fine, b.dW, b.dB);
        return t.xhat.back();
    });

    run_case("coupled error (N=64)", 1000, static_cast<double>(n_f), "Mstep", [&](std::int64_t j) {
        const auto b = hbl::sample_path(fine, 1, static_cast<std::uint64_t>(j));
        const auto ref = hbl::run_reference(p, fine, b.dW, b.dB);
        const auto cb = hbl::coarsen_increments(b, 64);
        const auto tr = hbl::run_euler(p, hbl::TimeGrid(p.T, 64), cb.dW, cb.dB);
        return std::abs(tr.xhat.back() - ref.xhat.back());
    });
    return 0;
}
