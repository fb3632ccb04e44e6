#include "hbl/error_lab.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "hbl/bridge.hpp"
#include "hbl/parallel.hpp"
#include "hbl/paths.hpp"
#include "hbl/schemes.hpp"
#include "hbl/stats.hpp"

namespace hbl {

std::vector<ErrorReport> strong_error_sweep(const HestonParams& p, std::span<const std::int64_t> Ns,
                                            std::int64_t N_f, std::int64_t M, std::uint64_t seed,
                                            ReferenceKind ref) {
    if (Ns.empty()) throw std::invalid_argument("need at least one coarse resolution");
    if (M < 32) throw std::invalid_argument("need at least 32 paths for batch standard errors");
    for (std::int64_t N : Ns)
        if (N < 1 || N_f % N != 0)
            throw std::invalid_argument("every coarse step count must divide the fine one");

    const TimeGrid fine(p.T, N_f);
    const auto n_res = Ns.size();
    const auto m = static_cast<std::size_t>(M);
    // Path-indexed slots keep the reduction deterministic for any thread count.
    std::vector<std::vector<double>> abs_x(n_res, std::vector<double>(m));
    std::vector<std::vector<double>> abs_v(n_res, std::vector<double>(m));
    std::vector<std::vector<double>> abs_l1(n_res, std::vector<double>(m));

    par::parallel_for(M, [&](std::int64_t j) {
        const PathBundle bundle = sample_path(fine, seed, static_cast<std::uint64_t>(j));
        const SchemeTrajectory reference = ref == ReferenceKind::euler
                                               ? run_euler(p, fine, bundle.dW, bundle.dB)
                                               : run_reference(p, fine, bundle.dW, bundle.dB);
        const double x_ref = reference.xhat.back();
        const double v_ref = reference.vhat.back();
        for (std::size_t r = 0; r < n_res; ++r) {
            const std::int64_t N = Ns[r];
            const TimeGrid coarse(p.T, N);
            const CoarseBundle cb = coarsen_increments(bundle, N);
            const SchemeTrajectory traj = run_euler(p, coarse, cb.dW, cb.dB);
            const double dx = std::abs(traj.xhat.back() - x_ref);
            const double dv = std::abs(traj.vhat.back() - v_ref);
            abs_x[r][static_cast<std::size_t>(j)] = dx;
            abs_v[r][static_cast<std::size_t>(j)] = dv;
            abs_l1[r][static_cast<std::size_t>(j)] = dx + dv;
        }
    });

    std::vector<ErrorReport> reports(n_res);
    for (std::size_t r = 0; r < n_res; ++r) {
        const auto mx = stats::batch_mean_se(abs_x[r]);
        const auto mv = stats::batch_mean_se(abs_v[r]);
        const auto ml = stats::batch_mean_se(abs_l1[r]);
        reports[r] =
            ErrorReport{Ns[r], M, N_f, mx.mean, mx.se, mv.mean, mv.se, ml.mean, ml.se};
    }
    return reports;
}

ErrorReport strong_error(const HestonParams& p, std::int64_t N, std::int64_t N_f, std::int64_t M,
                         std::uint64_t seed, ReferenceKind ref) {
    const std::int64_t ns[1] = {N};
    return strong_error_sweep(p, ns, N_f, M, seed, ref)[0];
}

RateFit fit_rate(std::span<const ErrorReport> reports, ErrorComponent component,
                 double expected_order) {
    if (reports.size() < 4) throw std::invalid_argument("rate fit needs at least 4 error reports");
    std::set<std::int64_t> seen;
    RateFit fit;
    for (const auto& r : reports) {
        if (!seen.insert(r.N).second)
            throw std::invalid_argument("rate fit needs distinct step counts");
        const double err = component == ErrorComponent::x   ? r.err_x
                           : component == ErrorComponent::v ? r.err_v
                                                            : r.err_l1;
        fit.log_n.push_back(std::log(static_cast<double>(r.N)));
        fit.log_err.push_back(std::log(err));
    }
    const auto line = stats::least_squares(fit.log_n, fit.log_err);
    fit.slope = -line.slope; // positive convergence order
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    fit.expected_order = expected_order;
    return fit;
}

double barrier_constant(const HestonParams& p) {
    if (p.feller_index() <= 0.5)
        throw std::domain_error("lower-bound constant requires Feller index > 1/2");
    if (std::abs(p.rho) >= 1.0)
        throw std::domain_error("lower-bound constant requires |rho| != 1");
    return p.sigma * p.T / 8.0 * std::sqrt(1.0 - p.rho * p.rho);
}

std::vector<BarrierRow> barrier_table(const HestonParams& p, std::span<const std::int64_t> Ns,
                                      std::int64_t N_f, std::int64_t M, int refine_level,
                                      std::uint64_t seed) {
    const double c = barrier_constant(p); // validates the parameter regime
    const auto reports = strong_error_sweep(p, Ns, N_f, M, seed);
    // The bridge annotation is insensitive to the sample count compared with
    // the coupled error, so it runs on a capped ensemble.
    const std::int64_t m_bridge = std::min<std::int64_t>(M, 10000);
    std::vector<BarrierRow> rows(reports.size());
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        BarrierRow row;
        row.N = rep.N;
        row.floor = c / std::sqrt(static_cast<double>(rep.N));
        row.err_x = rep.err_x;
        row.se_x = rep.se_x;
        row.ratio = rep.err_x / row.floor;
        const auto id = distribution_identity_test(m_bridge, rep.N, refine_level, seed + 1, p.T);
        row.bridge_scaled = std::sqrt(static_cast<double>(rep.N)) * id.mean_abs_I / p.T;
        const double rel_se = rep.se_x / rep.err_x;
        row.floor_ok = rep.err_x >= row.floor * (1.0 - 3.0 * rel_se);
        row.bracket_ok = row.bridge_scaled >= 0.25 && row.bridge_scaled <= 0.33;
        rows[r] = row;
    }
    return rows;
}

double cir_rate_exponent(double nu, double eps) {
    if (!(nu > 0.0)) throw std::domain_error("Feller index must be > 0");
    if (!(eps > 0.0 && eps < std::min(nu, 0.5)))
        throw std::domain_error("eps must lie in (0, min(nu, 1/2))");
    if (nu > 2.0) return 1.0;
    if ((nu > 1.0 && nu <= 2.0) || nu == 0.5) return 0.5;
    return std::min(nu, 0.5) - eps;
}

} // namespace hbl
