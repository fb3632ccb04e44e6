#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hbl/grid.hpp"

namespace hbl {

// Increments of the two independent driving Brownian motions W and B on a
// fine grid. dW[k] = W_{t_{k+1}} - W_{t_k}. A bundle is a pure function of
// (seed, seed_id, grid): regenerating it on any thread gives identical bits.
struct PathBundle {
    TimeGrid grid;
    std::vector<double> dW;
    std::vector<double> dB;
    std::uint64_t seed_id = 0;
};

PathBundle sample_path(const TimeGrid& grid, std::uint64_t seed, std::uint64_t seed_id);

// Prefix sums with a zero front: out[k] = sum of increments[0..k), so
// out[0] = 0 and out[N] is the terminal value.
std::vector<double> cumulative_path(std::span<const double> increments);

// Aggregates fine increments over coarse cells (N_coarse must divide the
// fine step count). Increments are adjacent differences of the fine prefix
// sums at the shared knots; N_coarse equal to the fine count returns the
// input unchanged.
std::vector<double> coarsen_increments(std::span<const double> fine, std::int64_t N_coarse);

// Coarse view of a path. The knot arrays are the fine cumulative sums
// subsampled at the shared knots, bit for bit, which is what makes the
// coarse/fine coupling exact; dW/dB are their adjacent differences.
struct CoarseBundle {
    std::int64_t N = 0;
    std::vector<double> dW;
    std::vector<double> dB;
    std::vector<double> W_knots; // size N+1, W_knots[0] == 0
    std::vector<double> B_knots;
};
CoarseBundle coarsen_increments(const PathBundle& bundle, std::int64_t N_coarse);

// Further coarsening of an already coarse view; knots subsample exactly, so
// nesting through intermediate resolutions equals direct coarsening.
CoarseBundle coarsen_increments(const CoarseBundle& bundle, std::int64_t N_coarse);

// Increments of Z with dZ = rho dW + sqrt(1-rho^2) dB.
std::vector<double> correlate(const PathBundle& bundle, double rho);

} // namespace hbl
