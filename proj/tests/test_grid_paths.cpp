#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hbl/grid.hpp"
#include "hbl/parallel.hpp"
#include "hbl/paths.hpp"
#include "hbl/stats.hpp"

using namespace hbl;

TEST_CASE("grid knots, exact endpoints, eta") {
    const TimeGrid g(1.0, 4);
    const double expected[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int k = 0; k <= 4; ++k) CHECK(g.knot(k) == expected[k]);
    CHECK(g.eta(0.3) == 0.25);
    for (int k = 0; k <= 4; ++k) CHECK(g.eta(g.knot(k)) == g.knot(k));
    CHECK(g.eta(0.2499999) == 0.0);
    CHECK(g.left_index(-1.0) == 0);
    CHECK(g.left_index(2.0) == 4);

    // Awkward horizons still hit the endpoint exactly.
    const TimeGrid h(0.7, 7);
    CHECK(h.knot(0) == 0.0);
    CHECK(h.knot(7) == 0.7);
    for (std::int64_t k = 0; k < 7; ++k) {
        const double t = h.knot(k) + 0.5 * h.dt();
        CHECK(h.eta(t) == h.knot(k));
        CHECK(h.eta(t) <= t);
        CHECK(t < h.eta(t) + h.dt());
    }

    CHECK_THROWS_AS(TimeGrid(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
}

TEST_CASE("path bundles: reproducible and thread independent") {
    const TimeGrid g(1.0, 64);
    const auto a = sample_path(g, 99, 5);
    const auto b = sample_path(g, 99, 5);
    CHECK(a.dW == b.dW);
    CHECK(a.dB == b.dB);
    CHECK(sample_path(g, 99, 6).dW != a.dW);
    CHECK(sample_path(g, 100, 5).dW != a.dW);

    // Serial and parallel generation of a stream produce identical bits.
    const std::int64_t M = 128;
    std::vector<double> serial(static_cast<std::size_t>(M)), parallel(static_cast<std::size_t>(M));
    par::serial_for(M, [&](std::int64_t j) {
        serial[static_cast<std::size_t>(j)] =
            cumulative_path(sample_path(g, 7, static_cast<std::uint64_t>(j)).dW).back();
    });
    par::parallel_for(M, [&](std::int64_t j) {
        parallel[static_cast<std::size_t>(j)] =
            cumulative_path(sample_path(g, 7, static_cast<std::uint64_t>(j)).dW).back();
    });
    CHECK(serial == parallel);
}

TEST_CASE("ensemble statistics of the increments") {
    const double T = 2.0;
    const TimeGrid g(T, 8);
    const std::int64_t M = 100000;
    std::vector<double> wT(static_cast<std::size_t>(M)), bT(static_cast<std::size_t>(M));
    std::vector<double> w1(static_cast<std::size_t>(M)), b1(static_cast<std::size_t>(M));
    par::parallel_for(M, [&](std::int64_t j) {
        const auto bundle = sample_path(g, 31, static_cast<std::uint64_t>(j));
        double sw = 0, sb = 0;
        for (double x : bundle.dW) sw += x;
        for (double x : bundle.dB) sb += x;
        wT[static_cast<std::size_t>(j)] = sw;
        bT[static_cast<std::size_t>(j)] = sb;
        w1[static_cast<std::size_t>(j)] = bundle.dW[3];
        b1[static_cast<std::size_t>(j)] = bundle.dB[3];
    });
    // W_T mean 0 within 3 sqrt(T/M); variance T within 3 SE of the variance
    // estimator (SE from the sample fourth moment: var(s^2) ~ 2 var^2/M).
    const auto mw = stats::mean_se(wT);
    CHECK(std::abs(mw.mean) < 3.0 * std::sqrt(T / static_cast<double>(M)));
    const double vw = stats::sample_variance(wT);
    const double se_var = std::sqrt(2.0 / static_cast<double>(M)) * vw;
    CHECK(std::abs(vw - T) < 3.0 * se_var);

    // Same-knot increments of W and B are uncorrelated within 4 SE.
    double cross = 0;
    for (std::size_t i = 0; i < w1.size(); ++i) cross += w1[i] * b1[i];
    cross /= static_cast<double>(M);
    const double se_cross = g.dt() / std::sqrt(static_cast<double>(M));
    CHECK(std::abs(cross) < 4.0 * se_cross);
}

TEST_CASE("coarsening: identity, constants, exact telescoping") {
    const TimeGrid g(1.0, 256);
    const auto bundle = sample_path(g, 77, 0);

    SUBCASE("identity when counts match") {
        CHECK(coarsen_increments(bundle.dW, 256) == bundle.dW);
    }
    SUBCASE("constant increments sum exactly") {
        std::vector<double> c(256, 0x1.0p-10);
        const auto cc = coarsen_increments(c, 32);
        for (double v : cc) CHECK(v == 8 * 0x1.0p-10);
    }
    SUBCASE("cumulative sums at shared knots agree bit for bit") {
        const auto fine_cum_w = cumulative_path(bundle.dW);
        const auto fine_cum_b = cumulative_path(bundle.dB);
        for (std::int64_t nc : {1, 4, 32, 128, 256}) {
            const auto cb = coarsen_increments(bundle, nc);
            const std::int64_t m = 256 / nc;
            for (std::int64_t k = 0; k <= nc; ++k) {
                CHECK(cb.W_knots[static_cast<std::size_t>(k)] ==
                      fine_cum_w[static_cast<std::size_t>(k * m)]);
                CHECK(cb.B_knots[static_cast<std::size_t>(k)] ==
                      fine_cum_b[static_cast<std::size_t>(k * m)]);
            }
            // strict coarsenings: increments are the adjacent knot differences
            if (nc < 256)
                for (std::int64_t k = 0; k < nc; ++k)
                    CHECK(cb.dW[static_cast<std::size_t>(k)] ==
                          cb.W_knots[static_cast<std::size_t>(k + 1)] -
                              cb.W_knots[static_cast<std::size_t>(k)]);
            else
                CHECK(cb.dW == bundle.dW); // same resolution: identity
        }
    }
    SUBCASE("nested coarsening equals direct coarsening") {
        const auto via64 = coarsen_increments(coarsen_increments(bundle, 64), 16);
        const auto direct = coarsen_increments(bundle, 16);
        CHECK(via64.dW == direct.dW);
        CHECK(via64.dB == direct.dB);
        CHECK(via64.W_knots == direct.W_knots);
        // and through a second intermediate level
        const auto via128 = coarsen_increments(coarsen_increments(bundle, 128), 16);
        CHECK(via128.dW == direct.dW);
    }
    SUBCASE("non-divisors are rejected") {
        CHECK_THROWS_AS(coarsen_increments(bundle.dW, 3), std::invalid_argument);
        CHECK_THROWS_AS(coarsen_increments(bundle.dW, 0), std::invalid_argument);
    }
}

TEST_CASE("correlated increments") {
    const TimeGrid g(1.0, 32);
    const auto bundle = sample_path(g, 5, 1);
    SUBCASE("rho endpoints reduce to the drivers") {
        CHECK(correlate(bundle, 0.0) == bundle.dB);
        CHECK(correlate(bundle, 1.0) == bundle.dW);
    }
    SUBCASE("terminal correlation matches rho") {
        const double rho = 0.6;
        const std::int64_t M = 100000;
        std::vector<double> zT(static_cast<std::size_t>(M)), wT(static_cast<std::size_t>(M));
        par::parallel_for(M, [&](std::int64_t j) {
            const auto b = sample_path(g, 6, static_cast<std::uint64_t>(j));
            const auto z = correlate(b, rho);
            double sz = 0, sw = 0;
            for (double v : z) sz += v;
            for (double v : b.dW) sw += v;
            zT[static_cast<std::size_t>(j)] = sz;
            wT[static_cast<std::size_t>(j)] = sw;
        });
        const double r = stats::sample_correlation(zT, wT);
        const double se = (1.0 - rho * rho) / std::sqrt(static_cast<double>(M));
        CHECK(std::abs(r - rho) < 3.0 * se);
    }
    SUBCASE("rho outside [-1,1] rejected") {
        CHECK_THROWS_AS(correlate(bundle, 1.5), std::invalid_argument);
    }
}
