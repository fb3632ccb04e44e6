#pragma once

#include <span>
#include <vector>

#include "hbl/bridge.hpp"
#include "hbl/grid.hpp"
#include "hbl/params.hpp"
#include "hbl/schemes.hpp"

namespace hbl {

// Conditional expectation of int_0^1 W dB given the grid values
// W_{t_1}..W_{t_N}, B_{t_1}..B_{t_N} (equidistant on [0,1], zero start
// implied):
//   sum_k W_{t_k} (B_{t_{k+1}} - B_{t_k}) + (1/2) dW_k dB_k.
// This is the best L2 estimator of the Clark-Cameron integral from
// equidistant data. Throws std::invalid_argument on length mismatch.
double clark_cameron_estimate(std::span<const double> W_knots, std::span<const double> B_knots);

// Left-point fine-grid sum of the piecewise-linear interpolant against W:
// int Bbar dW. Satisfies int B dW - int Bbar dW == iterated_integral_dyadic
// up to summation rounding when both use the same fine grid.
double linear_interp_integral(const BridgeEnsemble& ens, std::span<const double> W_fine_knots);

// Pathwise split of the terminal log-price into a part measurable from
// (W, grid values of B) and the two residual stochastic integrals:
//   X_T = y_measurable + sqrt(1-rho^2) int fv dB - (sigma/2) sqrt(1-rho^2) int B dW.
// fv is the finite-variation part of sqrt(V): fv(t) = int_0^t a_u du with
//   a_u = ((4 kappa theta - sigma^2)/8) / sqrt(V_u) - (kappa/2) sqrt(V_u),
// zeroed below the positivity floor.
struct DecompositionParts {
    double y_measurable = 0.0;        // Y_T
    std::vector<double> sqrt_v;       // U_t at fine knots
    std::vector<double> fv_rate;      // a_u at fine knots
    std::vector<double> fv_part;      // fv(t) at fine knots, trapezoidal in a
    double int_fv_db = 0.0;           // left-point sum of fv against B
    double int_b_dw = 0.0;            // left-point sum of B against W
    double x_reconstructed = 0.0;     // exact recombination of the above
};

// Requires Feller index > 1/2 and a positive-variance fine trajectory (from
// run_reference). Throws std::domain_error otherwise.
DecompositionParts decompose_log_price(const HestonParams& p, const SchemeTrajectory& fine_traj,
                                       std::span<const double> dW, std::span<const double> dB);

// Coarse left-point Riemann sum of the finite-variation part against B:
// sum_i fv(t_i) (B_{t_{i+1}} - B_{t_i}) over the coarse knots, which must
// nest in the decomposition's fine grid.
double riemann_fv_db(const DecompositionParts& parts, const TimeGrid& grid_fine,
                     const TimeGrid& grid_coarse, std::span<const double> dB_coarse);

// Positivity floor implementing the indicator in the finite-variation
// integrand on discrete paths.
inline constexpr double kVarianceFloor = 1e-12;

// Clark-Cameron experiment: RMS distance between the conditional-expectation
// estimator from N-point data and the fine-grid value of int_0^1 W dB on the
// same realization. The known exact error is 0.5 N^{-1/2}.
struct CcRow {
    std::int64_t N = 0;
    std::int64_t M = 0;
    double rms = 0.0;
    double se = 0.0;     // delta-method SE of the RMS
    double target = 0.0; // 0.5 N^{-1/2}
    bool pass = false;   // |rms - target| <= 0.02 target + 3 se
};
std::vector<CcRow> clark_cameron_table(std::span<const std::int64_t> Ns, std::int64_t N_f,
                                       std::int64_t M, std::uint64_t seed);

// L1 gap between the full-truncation Euler log-price and the reconstruction
// from the decomposition, both at resolution N_f on shared increments. The
// gap shrinks as N_f grows since both sides converge to the same limit.
struct ReconstructionGapRow {
    std::int64_t N_f = 0;
    std::int64_t M = 0;
    double gap = 0.0;
    double se = 0.0;
};
std::vector<ReconstructionGapRow> reconstruction_gap_table(const HestonParams& p,
                                                           std::span<const std::int64_t> fine_levels,
                                                           std::int64_t M, std::uint64_t seed);

// L1 gap between the fine-grid int fv dB and its coarse left-point Riemann
// sum over N knots; decays at least like N^{-1/2} (proved order 5/8).
struct RiemannGapRow {
    std::int64_t N = 0;
    std::int64_t M = 0;
    double gap = 0.0;
    double se = 0.0;
};
std::vector<RiemannGapRow> riemann_gap_table(const HestonParams& p,
                                             std::span<const std::int64_t> Ns, std::int64_t N_f,
                                             std::int64_t M, std::uint64_t seed);

} // namespace hbl
