#include "hbl/bridge.hpp"

#include <cmath>
#include <stdexcept>

#include "hbl/parallel.hpp"
#include "hbl/paths.hpp"
#include "hbl/rng.hpp"
#include "hbl/stats.hpp"

namespace hbl {

namespace {

int refinement_level(const TimeGrid& coarse, const TimeGrid& fine) {
    if (fine.horizon() != coarse.horizon())
        throw std::invalid_argument("bridge grids must share the horizon");
    const std::int64_t ratio = fine.steps() / coarse.steps();
    if (ratio * coarse.steps() != fine.steps() || (ratio & (ratio - 1)) != 0)
        throw std::invalid_argument("fine grid must refine the coarse grid dyadically");
    int n = 0;
    for (std::int64_t r = ratio; r > 1; r >>= 1) ++n;
    return n;
}

} // namespace

BridgeEnsemble bridge_decompose(std::span<const double> B_fine_knots, const TimeGrid& grid_coarse,
                                const TimeGrid& grid_fine) {
    if (B_fine_knots.size() != static_cast<std::size_t>(grid_fine.steps()) + 1)
        throw std::invalid_argument("knot array must have fine steps + 1 entries");
    BridgeEnsemble ens{grid_coarse, grid_fine, refinement_level(grid_coarse, grid_fine),
                       std::vector<double>(B_fine_knots.begin(), B_fine_knots.end()),
                       std::vector<double>(B_fine_knots.size()),
                       std::vector<double>(B_fine_knots.size())};
    const std::int64_t m = grid_fine.steps() / grid_coarse.steps();
    for (std::int64_t k = 0; k < grid_coarse.steps(); ++k) {
        const double left = B_fine_knots[static_cast<std::size_t>(k * m)];
        const double right = B_fine_knots[static_cast<std::size_t>((k + 1) * m)];
        for (std::int64_t j = 0; j < m; ++j) {
            const auto idx = static_cast<std::size_t>(k * m + j);
            // j = 0 lands exactly on the coarse knot value, so Bcirc is 0 there.
            ens.Bbar[idx] = left + (right - left) * (static_cast<double>(j) / static_cast<double>(m));
            ens.Bcirc[idx] = ens.B_fine[idx] - ens.Bbar[idx];
        }
    }
    ens.Bbar.back() = B_fine_knots.back();
    ens.Bcirc.back() = 0.0;
    return ens;
}

double iterated_integral_dyadic(const BridgeEnsemble& ens, std::span<const double> W_fine_knots) {
    if (W_fine_knots.size() != ens.B_fine.size())
        throw std::invalid_argument("W knot array must match the ensemble's fine grid");
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < W_fine_knots.size(); ++j)
        s += ens.Bcirc[j] * (W_fine_knots[j + 1] - W_fine_knots[j]);
    return s;
}

double bridge_l2_riemann(const BridgeEnsemble& ens) {
    const double dt = ens.grid_fine.dt();
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < ens.Bcirc.size(); ++j) s += ens.Bcirc[j] * ens.Bcirc[j];
    return s * dt;
}

double BridgeL2Profile::pointwise(double t) const {
    const TimeGrid grid(T, N);
    std::int64_t k = grid.left_index(t);
    if (k == N) k = N - 1;
    const double a = grid.knot(k), b = grid.knot(k + 1);
    return (t - a) * (b - t) / (b - a);
}

BridgeL2Profile bridge_l2_profile(const TimeGrid& grid) {
    BridgeL2Profile prof;
    prof.T = grid.horizon();
    prof.N = grid.steps();
    const double dt = grid.dt();
    prof.integral_sqrt_closed =
        std::sqrt(prof.T * prof.T * prof.T / static_cast<double>(prof.N)) * M_PI / 8.0;
    // One cell: int_0^dt sqrt(t (dt-t)/dt) dt. The substitution t = dt sin^2
    // phi removes the endpoint singularities; the transformed integrand is
    // 2 dt^{3/2} sin^2 phi cos^2 phi over [0, pi/2].
    const double cell = stats::gauss_legendre(0.0, 0.5 * M_PI, [dt](double phi) {
        const double sc = std::sin(phi) * std::cos(phi);
        return 2.0 * std::pow(dt, 1.5) * sc * sc;
    });
    prof.integral_sqrt_quadrature = static_cast<double>(prof.N) * cell;
    return prof;
}

IdentityTestResult distribution_identity_test(std::int64_t M, std::int64_t N, int n,
                                              std::uint64_t seed, double T) {
    if (M < 1000) throw std::invalid_argument("identity test needs M >= 1000");
    if (n < 6) throw std::invalid_argument("identity test needs refinement level n >= 6");
    const TimeGrid fine(T, N << n);
    const auto fine_steps = static_cast<std::size_t>(fine.steps());
    const std::int64_t m = std::int64_t{1} << n; // fine steps per coarse cell
    const double sqrt_dt = std::sqrt(fine.dt());

    std::vector<double> iterated(static_cast<std::size_t>(M));
    std::vector<double> comparison(static_cast<std::size_t>(M));
    par::parallel_for(M, [&](std::int64_t j) {
        // Streaming form of sample_path + bridge_decompose, one coarse cell
        // at a time: same variate addressing and summation order, without
        // the full-path arrays.
        std::vector<double> dw(static_cast<std::size_t>(m)), db(static_cast<std::size_t>(m));
        std::vector<double> b_knots(static_cast<std::size_t>(m)); // running B inside the cell
        double b_run = 0.0, i_sum = 0.0, q_sum = 0.0;
        for (std::int64_t k = 0; k < N; ++k) {
            rng::fill_normal_pairs(seed, static_cast<std::uint64_t>(j), dw, db,
                                   static_cast<std::uint64_t>(k * m));
            const double left = b_run;
            for (std::int64_t i = 0; i < m; ++i) {
                b_run += sqrt_dt * db[static_cast<std::size_t>(i)];
                b_knots[static_cast<std::size_t>(i)] = b_run;
            }
            const double right = b_run;
            double bcirc = 0.0; // vanishes at the cell's left knot
            for (std::int64_t i = 0; i < m; ++i) {
                i_sum += bcirc * sqrt_dt * dw[static_cast<std::size_t>(i)];
                q_sum += bcirc * bcirc;
                const double bbar = left + (right - left) * (static_cast<double>(i + 1) /
                                                             static_cast<double>(m));
                bcirc = b_knots[static_cast<std::size_t>(i)] - bbar;
            }
        }
        iterated[static_cast<std::size_t>(j)] = i_sum;
        // Fresh Gaussian from the variate just past the increment block:
        // independent of every increment by counter addressing.
        rng::CounterStream s(seed, static_cast<std::uint64_t>(j));
        const double g = s.normal_at(2 * static_cast<std::uint64_t>(fine_steps));
        comparison[static_cast<std::size_t>(j)] = g * std::sqrt(q_sum * fine.dt());
    });

    IdentityTestResult res;
    res.ks_stat = stats::two_sample_ks(iterated, comparison);
    double sum_abs = 0.0, sum = 0.0, sum_cmp = 0.0;
    for (std::int64_t j = 0; j < M; ++j) {
        sum_abs += std::abs(iterated[static_cast<std::size_t>(j)]);
        sum += iterated[static_cast<std::size_t>(j)];
        sum_cmp += comparison[static_cast<std::size_t>(j)];
    }
    res.mean_abs_I = sum_abs / static_cast<double>(M);
    res.mean_I = sum / static_cast<double>(M);
    res.mean_comparison = sum_cmp / static_cast<double>(M);
    return res;
}

} // namespace hbl
