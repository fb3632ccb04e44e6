#include "hbl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hbl/parallel.hpp"
#include "hbl/paths.hpp"
#include "hbl/stats.hpp"

namespace hbl {

double clark_cameron_estimate(std::span<const double> W_knots, std::span<const double> B_knots) {
    if (W_knots.size() != B_knots.size() || W_knots.empty())
        throw std::invalid_argument("knot arrays must be non-empty and equal length");
    double s = 0.0;
    double w_prev = 0.0, b_prev = 0.0; // zero start implied
    for (std::size_t k = 0; k < W_knots.size(); ++k) {
        const double dw = W_knots[k] - w_prev;
        const double db = B_knots[k] - b_prev;
        s += w_prev * db + 0.5 * dw * db;
        w_prev = W_knots[k];
        b_prev = B_knots[k];
    }
    return s;
}

double linear_interp_integral(const BridgeEnsemble& ens, std::span<const double> W_fine_knots) {
    if (W_fine_knots.size() != ens.Bbar.size())
        throw std::invalid_argument("W knot array must match the ensemble's fine grid");
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < W_fine_knots.size(); ++j)
        s += ens.Bbar[j] * (W_fine_knots[j + 1] - W_fine_knots[j]);
    return s;
}

DecompositionParts decompose_log_price(const HestonParams& p, const SchemeTrajectory& fine_traj,
                                       std::span<const double> dW, std::span<const double> dB) {
    if (p.feller_index() <= 0.5)
        throw std::domain_error("decomposition requires Feller index > 1/2");
    const auto n = static_cast<std::size_t>(fine_traj.grid.steps());
    if (dW.size() != n || dB.size() != n || fine_traj.vhat.size() != n + 1)
        throw std::invalid_argument("increment arrays must match the trajectory grid");

    DecompositionParts parts;
    parts.sqrt_v.resize(n + 1);
    parts.fv_rate.resize(n + 1);
    parts.fv_part.resize(n + 1);

    const double c_inv = (4.0 * p.kappa * p.theta - p.sigma * p.sigma) / 8.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double v = fine_traj.vhat[k];
        const double u = v > 0.0 ? std::sqrt(v) : 0.0;
        parts.sqrt_v[k] = u;
        parts.fv_rate[k] = v > kVarianceFloor ? c_inv / u - 0.5 * p.kappa * u : 0.0;
    }

    const double dt = fine_traj.grid.dt();
    parts.fv_part[0] = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += 0.5 * dt * (parts.fv_rate[k] + parts.fv_rate[k + 1]);
        parts.fv_part[k + 1] = acc;
    }

    double int_v = 0.0; // trapezoid of V
    for (std::size_t k = 0; k < n; ++k)
        int_v += 0.5 * dt * (fine_traj.vhat[k] + fine_traj.vhat[k + 1]);

    // Left-point Ito sums of fv against B and of B against W.
    double b = 0.0, w = 0.0, int_fv_db = 0.0, int_b_dw = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        int_fv_db += parts.fv_part[k] * dB[k];
        int_b_dw += b * dW[k];
        b += dB[k];
        w += dW[k];
    }
    parts.int_fv_db = int_fv_db;
    parts.int_b_dw = int_b_dw;

    const double b_T = b;
    const double v_T = fine_traj.vhat[n];
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    parts.y_measurable = p.x0 + (p.rho / p.sigma) * (v_T - p.v0 - p.kappa * p.theta * p.T) +
                         p.mu * p.T + (p.rho * p.kappa / p.sigma - 0.5) * int_v +
                         rho_c * (parts.sqrt_v[n] * b_T - parts.fv_part[n] * b_T);
    parts.x_reconstructed =
        parts.y_measurable + rho_c * parts.int_fv_db - 0.5 * p.sigma * rho_c * parts.int_b_dw;
    return parts;
}

double riemann_fv_db(const DecompositionParts& parts, const TimeGrid& grid_fine,
                     const TimeGrid& grid_coarse, std::span<const double> dB_coarse) {
    if (grid_fine.steps() % grid_coarse.steps() != 0 ||
        grid_fine.horizon() != grid_coarse.horizon())
        throw std::invalid_argument("coarse grid must nest in the fine grid");
    if (dB_coarse.size() != static_cast<std::size_t>(grid_coarse.steps()))
        throw std::invalid_argument("coarse increments must match the coarse grid");
    if (parts.fv_part.size() != static_cast<std::size_t>(grid_fine.steps()) + 1)
        throw std::invalid_argument("decomposition does not match the fine grid");
    const std::int64_t m = grid_fine.steps() / grid_coarse.steps();
    double s = 0.0;
    for (std::int64_t i = 0; i < grid_coarse.steps(); ++i)
        s += parts.fv_part[static_cast<std::size_t>(i * m)] * dB_coarse[static_cast<std::size_t>(i)];
    return s;
}

std::vector<CcRow> clark_cameron_table(std::span<const std::int64_t> Ns, std::int64_t N_f,
                                       std::int64_t M, std::uint64_t seed) {
    if (Ns.empty()) throw std::invalid_argument("need at least one resolution");
    for (std::int64_t N : Ns)
        if (N < 1 || N_f % N != 0)
            throw std::invalid_argument("every step count must divide the fine one");
    const TimeGrid fine(1.0, N_f); // the Clark-Cameron system lives on [0,1]
    const auto n_res = Ns.size();
    std::vector<std::vector<double>> sq(n_res, std::vector<double>(static_cast<std::size_t>(M)));

    par::parallel_for(M, [&](std::int64_t j) {
        const PathBundle bundle = sample_path(fine, seed, static_cast<std::uint64_t>(j));
        const std::vector<double> W = cumulative_path(bundle.dW);
        const std::vector<double> B = cumulative_path(bundle.dB);
        // Fine-grid left-point value of int_0^1 W dB on this realization.
        double fine_integral = 0.0;
        for (std::size_t k = 0; k + 1 < W.size(); ++k)
            fine_integral += W[k] * (B[k + 1] - B[k]);
        for (std::size_t r = 0; r < n_res; ++r) {
            const std::int64_t m = N_f / Ns[r];
            std::vector<double> Wk(static_cast<std::size_t>(Ns[r]));
            std::vector<double> Bk(static_cast<std::size_t>(Ns[r]));
            for (std::int64_t i = 1; i <= Ns[r]; ++i) {
                Wk[static_cast<std::size_t>(i - 1)] = W[static_cast<std::size_t>(i * m)];
                Bk[static_cast<std::size_t>(i - 1)] = B[static_cast<std::size_t>(i * m)];
            }
            const double err = clark_cameron_estimate(Wk, Bk) - fine_integral;
            sq[r][static_cast<std::size_t>(j)] = err * err;
        }
    });

    std::vector<CcRow> rows(n_res);
    for (std::size_t r = 0; r < n_res; ++r) {
        const auto ms = stats::batch_mean_se(sq[r]);
        CcRow row;
        row.N = Ns[r];
        row.M = M;
        row.rms = std::sqrt(ms.mean);
        row.se = ms.se / (2.0 * row.rms);
        row.target = 0.5 / std::sqrt(static_cast<double>(Ns[r]));
        row.pass = std::abs(row.rms - row.target) <= 0.02 * row.target + 3.0 * row.se;
        rows[r] = row;
    }
    return rows;
}

std::vector<ReconstructionGapRow> reconstruction_gap_table(const HestonParams& p,
                                                           std::span<const std::int64_t> fine_levels,
                                                           std::int64_t M, std::uint64_t seed) {
    if (p.feller_index() <= 0.5)
        throw std::domain_error("decomposition requires Feller index > 1/2");
    if (fine_levels.empty()) throw std::invalid_argument("need at least one fine level");
    std::int64_t finest = fine_levels[0];
    for (std::int64_t L : fine_levels) finest = std::max(finest, L);
    for (std::int64_t L : fine_levels)
        if (L < 1 || finest % L != 0)
            throw std::invalid_argument("fine levels must nest in the finest one");

    const TimeGrid finest_grid(p.T, finest);
    const auto n_lv = fine_levels.size();
    std::vector<std::vector<double>> gap(n_lv, std::vector<double>(static_cast<std::size_t>(M)));

    par::parallel_for(M, [&](std::int64_t j) {
        const PathBundle bundle = sample_path(finest_grid, seed, static_cast<std::uint64_t>(j));
        for (std::size_t r = 0; r < n_lv; ++r) {
            const TimeGrid grid(p.T, fine_levels[r]);
            const CoarseBundle cb = coarsen_increments(bundle, fine_levels[r]);
            const SchemeTrajectory ref = run_reference(p, grid, cb.dW, cb.dB);
            const DecompositionParts parts = decompose_log_price(p, ref, cb.dW, cb.dB);
            const SchemeTrajectory euler = run_euler(p, grid, cb.dW, cb.dB);
            gap[r][static_cast<std::size_t>(j)] = std::abs(euler.xhat.back() - parts.x_reconstructed);
        }
    });

    std::vector<ReconstructionGapRow> rows(n_lv);
    for (std::size_t r = 0; r < n_lv; ++r) {
        const auto ms = stats::batch_mean_se(gap[r]);
        rows[r] = ReconstructionGapRow{fine_levels[r], M, ms.mean, ms.se};
    }
    return rows;
}

std::vector<RiemannGapRow> riemann_gap_table(const HestonParams& p,
                                             std::span<const std::int64_t> Ns, std::int64_t N_f,
                                             std::int64_t M, std::uint64_t seed) {
    if (p.feller_index() <= 0.5)
        throw std::domain_error("decomposition requires Feller index > 1/2");
    if (Ns.empty()) throw std::invalid_argument("need at least one coarse resolution");
    for (std::int64_t N : Ns)
        if (N < 1 || N_f % N != 0)
            throw std::invalid_argument("every coarse step count must divide the fine one");

    const TimeGrid fine(p.T, N_f);
    const auto n_res = Ns.size();
    std::vector<std::vector<double>> gap(n_res, std::vector<double>(static_cast<std::size_t>(M)));

    par::parallel_for(M, [&](std::int64_t j) {
        const PathBundle bundle = sample_path(fine, seed, static_cast<std::uint64_t>(j));
        const SchemeTrajectory ref = run_reference(p, fine, bundle.dW, bundle.dB);
        const DecompositionParts parts = decompose_log_price(p, ref, bundle.dW, bundle.dB);
        for (std::size_t r = 0; r < n_res; ++r) {
            const TimeGrid coarse(p.T, Ns[r]);
            const std::vector<double> dB_c = coarsen_increments(bundle.dB, Ns[r]);
            const double riemann = riemann_fv_db(parts, fine, coarse, dB_c);
            gap[r][static_cast<std::size_t>(j)] = std::abs(parts.int_fv_db - riemann);
        }
    });

    std::vector<RiemannGapRow> rows(n_res);
    for (std::size_t r = 0; r < n_res; ++r) {
        const auto ms = stats::batch_mean_se(gap[r]);
        rows[r] = RiemannGapRow{Ns[r], M, ms.mean, ms.se};
    }
    return rows;
}

} // namespace hbl
