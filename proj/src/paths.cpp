#include "hbl/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "hbl/rng.hpp"

namespace hbl {

PathBundle sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t seed_id) {
    const auto n = static_cast<std::size_t>(grid.steps());
    PathBundle b{grid, std::vector<double>(n), std::vector<double>(n), seed_id};
    rng::fill_normal_pairs(seed, seed_id, b.dW, b.dB);
    const double sqrt_dt = std::sqrt(grid.dt());
    for (std::size_t i = 0; i < n; ++i) {
        b.dW[i] *= sqrt_dt;
        b.dB[i] *= sqrt_dt;
    }
    return b;
}

std::vector<double> cumulative_path(std::span<const double> increments) {
    std::vector<double> out(increments.size() + 1);
    out[0] = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        s += increments[i];
        out[i + 1] = s;
    }
    return out;
}

namespace {

void check_divides(std::int64_t N_f, std::int64_t N_coarse) {
    if (N_coarse < 1 || N_f % N_coarse != 0)
        throw std::invalid_argument("coarse step count must divide the fine step count");
}

std::vector<double> subsample_knots(std::span<const double> knots, std::int64_t N_coarse) {
    const std::int64_t m = (static_cast<std::int64_t>(knots.size()) - 1) / N_coarse;
    std::vector<double> out(static_cast<std::size_t>(N_coarse) + 1);
    for (std::int64_t k = 0; k <= N_coarse; ++k)
        out[static_cast<std::size_t>(k)] = knots[static_cast<std::size_t>(k * m)];
    return out;
}

std::vector<double> adjacent_differences(std::span<const double> knots) {
    std::vector<double> out(knots.size() - 1);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) out[k] = knots[k + 1] - knots[k];
    return out;
}

} // namespace

std::vector<double> coarsen_increments(std::span<const double> fine, std::int64_t N_coarse) {
    const auto N_f = static_cast<std::int64_t>(fine.size());
    check_divides(N_f, N_coarse);
    if (N_coarse == N_f) return {fine.begin(), fine.end()};
    return adjacent_differences(subsample_knots(cumulative_path(fine), N_coarse));
}

CoarseBundle coarsen_increments(const PathBundle& bundle, std::int64_t N_coarse) {
    check_divides(bundle.grid.steps(), N_coarse);
    CoarseBundle cb;
    cb.N = N_coarse;
    cb.W_knots = subsample_knots(cumulative_path(bundle.dW), N_coarse);
    cb.B_knots = subsample_knots(cumulative_path(bundle.dB), N_coarse);
    if (N_coarse == bundle.grid.steps()) {
        cb.dW = bundle.dW;
        cb.dB = bundle.dB;
    } else {
        cb.dW = adjacent_differences(cb.W_knots);
        cb.dB = adjacent_differences(cb.B_knots);
    }
    return cb;
}

CoarseBundle coarsen_increments(const CoarseBundle& bundle, std::int64_t N_coarse) {
    check_divides(bundle.N, N_coarse);
    CoarseBundle cb;
    cb.N = N_coarse;
    cb.W_knots = subsample_knots(bundle.W_knots, N_coarse);
    cb.B_knots = subsample_knots(bundle.B_knots, N_coarse);
    if (N_coarse == bundle.N) {
        cb.dW = bundle.dW;
        cb.dB = bundle.dB;
    } else {
        cb.dW = adjacent_differences(cb.W_knots);
        cb.dB = adjacent_differences(cb.B_knots);
    }
    return cb;
}

std::vector<double> correlate(const PathBundle& bundle, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
    const double c = std::sqrt(1.0 - rho * rho);
    std::vector<double> out(bundle.dW.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rho * bundle.dW[i] + c * bundle.dB[i];
    return out;
}

} // namespace hbl
