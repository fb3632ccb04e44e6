#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hbl/params.hpp"

namespace hbl {

// Coupled Monte Carlo estimate of the strong L1 error at T of a coarse
// scheme against the fine reference run on the same Brownian realization.
struct ErrorReport {
    std::int64_t N = 0;
    std::int64_t M = 0;
    std::int64_t N_f = 0;
    double err_x = 0.0, se_x = 0.0; // E|xhat_N - X_T|
    double err_v = 0.0, se_v = 0.0; // E|vhat_N - V_T|
    double err_l1 = 0.0, se_l1 = 0.0;
};

enum class ReferenceKind {
    drift_implicit_auto, // drift-implicit sqrt scheme, Euler fallback for low Feller index
    euler,               // full-truncation Euler at fine resolution
};

// Runs M coupled paths: fine increments are generated per (seed, path id),
// the reference runs at N_f, the coarse full-truncation Euler scheme runs
// on the aggregated increments at N. Standard errors use 32 batch means.
// Requires N | N_f and M >= 32; N_f/N >= 8 is the shipped experiment floor
// but not enforced here so the coupling can be tested at N == N_f.
ErrorReport strong_error(const HestonParams& p, std::int64_t N, std::int64_t N_f, std::int64_t M,
                         std::uint64_t seed, ReferenceKind ref = ReferenceKind::drift_implicit_auto);

// As above for a whole list of coarse resolutions sharing the same fine
// realizations (one reference run per path, reused across N values).
std::vector<ErrorReport> strong_error_sweep(const HestonParams& p, std::span<const std::int64_t> Ns,
                                            std::int64_t N_f, std::int64_t M, std::uint64_t seed,
                                            ReferenceKind ref = ReferenceKind::drift_implicit_auto);

// Least-squares fit of log err against log N. slope is reported as the
// positive convergence order (err ~ c N^-slope).
struct RateFit {
    std::vector<double> log_n;
    std::vector<double> log_err;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double expected_order = 0.0;
};

enum class ErrorComponent { x, v, l1 };

// Throws std::invalid_argument on fewer than 4 reports or repeated N.
RateFit fit_rate(std::span<const ErrorReport> reports, ErrorComponent component,
                 double expected_order);

// Lower-bound constant c = sigma T/8 sqrt(1-rho^2) for the X-component of
// any estimator built from equidistant data of both drivers; requires
// Feller index > 1/2 and |rho| != 1 (throws std::domain_error otherwise).
double barrier_constant(const HestonParams& p);

struct BarrierRow {
    std::int64_t N = 0;
    double floor = 0.0;          // c N^{-1/2}
    double err_x = 0.0;
    double se_x = 0.0;
    double ratio = 0.0;          // err_x / floor
    double bridge_scaled = 0.0;  // sqrt(N) E|I^n| / T
    bool floor_ok = false;       // err_x >= floor (1 - 3 relSE)
    bool bracket_ok = false;     // bridge_scaled in [0.25, 0.33]
};

// Per-N comparison of the measured Euler X-error against the theoretical
// floor, alongside the bridge quantity sqrt(N) E|I^n|/T and its bracket.
std::vector<BarrierRow> barrier_table(const HestonParams& p, std::span<const std::int64_t> Ns,
                                      std::int64_t N_f, std::int64_t M, int refine_level,
                                      std::uint64_t seed);

// Best known L1 convergence order for approximating the variance process
// from equidistant data of its driver:
//   1                      for nu > 2
//   1/2                    for nu in (1,2] or nu == 1/2
//   min(nu, 1/2) - eps     for nu in (0,1] \ {1/2}.
// Requires nu > 0 and 0 < eps < min(nu, 1/2); throws std::domain_error.
double cir_rate_exponent(double nu, double eps);

} // namespace hbl
