#include "hbl/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hbl/bridge.hpp"
#include "hbl/cli.hpp"
#include "hbl/error_lab.hpp"
#include "hbl/estimators.hpp"
#include "hbl/parallel.hpp"
#include "hbl/rng.hpp"
#include "hbl/schemes.hpp"
#include "hbl/stats.hpp"

namespace hbl::acceptance {

namespace {

using clock = std::chrono::steady_clock;

struct Ctx {
    Options opt;
    std::int64_t m_big;    // 1e5 full, 1e4 quick
    std::int64_t m_small;  // 1e4 full, 2e3 quick
    double ks_threshold;   // 0.02 full; rescaled to the smaller ensemble in quick
    std::vector<ErrorReport> high_reports; // shared by checks 5-7
    std::vector<ErrorReport> low_reports;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(5);
    s << v;
    return s.str();
}

CheckResult check_clark_cameron(const Ctx& c) {
    CheckResult r{1, "clark-cameron exact error 0.5 N^-1/2", true, "", 0};
    const std::int64_t Ns[3] = {4, 16, 64};
    const auto rows = clark_cameron_table(Ns, 4096, c.m_big, rng::derive_seed(c.opt.seed, 1));
    double worst = 0.0;
    for (const auto& row : rows) {
        worst = std::max(worst, std::abs(row.rms - row.target) / row.target);
        if (!row.pass) r.pass = false;
    }
    r.detail = "worst relative deviation " + fmt(worst);
    return r;
}

CheckResult check_bridge_quadrature(const Ctx&) {
    CheckResult r{2, "bridge quadrature identity sqrt(T^3/N) pi/8", true, "", 0};
    double worst = 0.0;
    for (std::int64_t N : {std::int64_t{1}, std::int64_t{4}, std::int64_t{32}}) {
        const auto prof = bridge_l2_profile(TimeGrid(1.0, N));
        const double rel =
            std::abs(prof.integral_sqrt_quadrature - prof.integral_sqrt_closed) /
            prof.integral_sqrt_closed;
        worst = std::max(worst, rel);
    }
    // pi/8 itself at T=1, N=1.
    const auto unit = bridge_l2_profile(TimeGrid(1.0, 1));
    worst = std::max(worst, std::abs(unit.integral_sqrt_closed - M_PI / 8.0) / (M_PI / 8.0));
    r.pass = worst <= 1e-10;
    r.detail = "worst relative error " + fmt(worst);
    return r;
}

CheckResult check_distribution_identity(const Ctx& c) {
    CheckResult r{3, "iterated-integral law and T/4 bracket", true, "", 0};
    const auto id8 = distribution_identity_test(c.m_big, 8, 10, rng::derive_seed(c.opt.seed, 3));
    const auto id64 = distribution_identity_test(c.m_big, 64, 10, rng::derive_seed(c.opt.seed, 4));
    const double s8 = std::sqrt(8.0) * id8.mean_abs_I;
    const double s64 = std::sqrt(64.0) * id64.mean_abs_I;
    const bool ks_ok = id8.ks_stat < c.ks_threshold;
    const bool bracket_ok = s8 >= 0.25 && s8 <= 0.33 && s64 >= 0.25 && s64 <= 0.33;
    r.pass = ks_ok && bracket_ok;
    r.detail = "ks=" + fmt(id8.ks_stat) + " (<" + fmt(c.ks_threshold) + "), scaled mean N=8: " +
               fmt(s8) + ", N=64: " + fmt(s64) + " (in [0.25,0.33])";
    return r;
}

CheckResult check_cir_marginal(const Ctx& c) {
    CheckResult r{4, "CIR marginal law: exact sampler and reference", true, "", 0};
    const HestonParams p = preset_params("high");
    const CirMoments target = cir_marginal_moments(p, p.T);
    const std::int64_t M = c.m_big;

    std::vector<double> exact(static_cast<std::size_t>(M));
    par::parallel_for(M, [&](std::int64_t j) {
        rng::CounterStream s(rng::derive_seed(c.opt.seed, 5), static_cast<std::uint64_t>(j));
        exact[static_cast<std::size_t>(j)] = cir_exact_transition(p.v0, p.T, p, s);
    });
    const TimeGrid fine(p.T, 4096);
    const double sqrt_dt = std::sqrt(fine.dt());
    std::vector<double> ref(static_cast<std::size_t>(M));
    par::parallel_for(M, [&](std::int64_t j) {
        std::vector<double> dw(4096);
        rng::fill_normals(rng::derive_seed(c.opt.seed, 6), static_cast<std::uint64_t>(j), dw);
        double u = std::sqrt(p.v0);
        for (double z : dw) u = drift_implicit_sqrt_step(u, sqrt_dt * z, fine.dt(), p);
        ref[static_cast<std::size_t>(j)] = u * u;
    });

    const auto mean = stats::batch_mean_se(exact);
    std::vector<double> sqdev(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = exact[i] - mean.mean;
        sqdev[i] = d * d;
    }
    const auto var = stats::batch_mean_se(sqdev);
    const double ks = stats::two_sample_ks(exact, ref);

    const bool mean_ok = std::abs(mean.mean - target.mean) <= 3.0 * mean.se;
    const bool var_ok = std::abs(var.mean - target.variance) <= 3.0 * var.se;
    const bool ks_ok = ks < c.ks_threshold;
    r.pass = mean_ok && var_ok && ks_ok;
    r.detail = "mean dev " + fmt(std::abs(mean.mean - target.mean) / mean.se) + " se, var dev " +
               fmt(std::abs(var.mean - target.variance) / var.se) + " se, ks=" + fmt(ks);
    return r;
}

CheckResult check_euler_rate(const Ctx& c) {
    CheckResult r{5, "euler L1 rate in [0.4, 0.6], high-Feller preset", true, "", 0};
    const auto fit = fit_rate(c.high_reports, ErrorComponent::l1, 0.5);
    r.pass = fit.slope >= 0.4 && fit.slope <= 0.6;
    r.detail = "fitted slope " + fmt(fit.slope) + ", r2 " + fmt(fit.r_squared);
    return r;
}

CheckResult check_barrier_floor(const Ctx& c) {
    CheckResult r{6, "X error above c N^-1/2, c = sigma T/8 sqrt(1-rho^2)", true, "", 0};
    const HestonParams p = preset_params("high");
    const double cst = barrier_constant(p);
    double worst_ratio = 1e300;
    for (const auto& rep : c.high_reports) {
        const double floor_n = cst / std::sqrt(static_cast<double>(rep.N));
        const double rel_se = rep.se_x / rep.err_x;
        worst_ratio = std::min(worst_ratio, rep.err_x / floor_n);
        if (rep.err_x < floor_n * (1.0 - 3.0 * rel_se)) r.pass = false;
    }
    r.detail = "min err_x/floor = " + fmt(worst_ratio);
    return r;
}

CheckResult check_regime_degradation(const Ctx& c) {
    CheckResult r{7, "V rate ordering: low Feller <= high Feller + 0.1", true, "", 0};
    const auto fit_high = fit_rate(c.high_reports, ErrorComponent::v, 1.0);
    const auto fit_low = fit_rate(c.low_reports, ErrorComponent::v, 0.3);
    const bool order_ok = fit_low.slope <= fit_high.slope + 0.1;
    const bool r2_ok = fit_high.r_squared >= 0.95 && fit_low.r_squared >= 0.95;
    r.pass = order_ok && r2_ok;
    r.detail = "slope low " + fmt(fit_low.slope) + " (r2 " + fmt(fit_low.r_squared) +
               "), high " + fmt(fit_high.slope) + " (r2 " + fmt(fit_high.r_squared) + ")";
    return r;
}

CheckResult check_decomposition(const Ctx& c) {
    CheckResult r{8, "reconstruction gap shrinks; riemann slope <= -0.5", true, "", 0};
    const HestonParams p = preset_params("high");
    const std::int64_t levels[3] = {1 << 10, 1 << 12, 1 << 14};
    const auto rec = reconstruction_gap_table(p, levels, c.m_small, rng::derive_seed(c.opt.seed, 8));
    const bool mono = rec[1].gap < rec[0].gap && rec[2].gap < rec[1].gap;

    const std::int64_t Ns[6] = {16, 32, 64, 128, 256, 512};
    const auto rie = riemann_gap_table(p, Ns, 4096, c.m_small, rng::derive_seed(c.opt.seed, 9));
    std::vector<double> lx, ly;
    for (const auto& row : rie) {
        lx.push_back(std::log(static_cast<double>(row.N)));
        ly.push_back(std::log(row.gap));
    }
    const auto fit = stats::least_squares(lx, ly);
    const bool slope_ok = fit.slope <= -0.5;
    r.pass = mono && slope_ok;
    r.detail = "gaps " + fmt(rec[0].gap) + " > " + fmt(rec[1].gap) + " > " + fmt(rec[2].gap) +
               (mono ? " (monotone)" : " (NOT monotone)") + ", riemann slope " + fmt(fit.slope);
    return r;
}

CheckResult check_determinism(const Ctx& c) {
    CheckResult r{9, "CSV bytes independent of thread count", true, "", 0};
    auto render = [&](const std::string& sub, int threads) {
        RunConfig cfg;
        cfg.subcommand = sub;
        cfg.preset = "high";
        cfg.steps = sub == "cc" ? std::vector<std::int64_t>{4, 16}
                                : std::vector<std::int64_t>{8};
        cfg.steps_fine = 256;
        cfg.paths = 2048;
        cfg.refine = 6;
        cfg.seed = c.opt.seed;
        cfg.threads = threads;
        std::ostringstream out, err;
        const int rc = run(cfg, out, err);
        return rc == 0 ? out.str() : std::string("exit ") + std::to_string(rc) + ": " + err.str();
    };
    const int many = std::max(2, par::max_threads());
    for (const char* sub : {"cc", "bridge-check"}) {
        const std::string one = render(sub, 1);
        const std::string par_a = render(sub, many);
        const std::string par_b = render(sub, many);
        if (one != par_a || par_a != par_b) {
            r.pass = false;
            r.detail += std::string(sub) + " differs across thread counts; ";
        }
    }
    if (r.pass) r.detail = "cc and bridge-check byte-identical for 1 and " + std::to_string(many) +
                           " threads";
    par::set_threads(0);
    return r;
}

} // namespace

std::vector<CheckResult> run_all(const Options& opt, std::ostream* progress) {
    Ctx c;
    c.opt = opt;
    c.m_big = opt.quick ? 10000 : 100000;
    c.m_small = opt.quick ? 2000 : 10000;
    // Asymptotic 1% critical value plus the discretization allowance 0.01.
    c.ks_threshold =
        opt.quick ? stats::ks_critical_value(static_cast<std::size_t>(c.m_big),
                                             static_cast<std::size_t>(c.m_big)) + 0.01
                  : 0.02;

    std::vector<CheckResult> results;
    auto record = [&](CheckResult (*fn)(const Ctx&)) {
        const auto t0 = clock::now();
        CheckResult res = fn(c);
        res.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        if (progress)
            (*progress) << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << " " << res.name << ": "
                        << res.detail << " (" << fmt(res.seconds) << " s)\n";
        results.push_back(std::move(res));
    };

    record(check_clark_cameron);
    record(check_bridge_quadrature);
    record(check_distribution_identity);
    record(check_cir_marginal);

    {
        const auto t0 = clock::now();
        const std::int64_t Ns[6] = {16, 32, 64, 128, 256, 512};
        const HestonParams high = preset_params("high");
        const HestonParams low = preset_params("low");
        c.high_reports = strong_error_sweep(high, Ns, 4096, c.m_big, rng::derive_seed(opt.seed, 55));
        c.low_reports = strong_error_sweep(low, Ns, 4096, c.m_big, rng::derive_seed(opt.seed, 56));
        if (progress)
            (*progress) << "[....] coupled sweeps done ("
                        << fmt(std::chrono::duration<double>(clock::now() - t0).count()) << " s)\n";
    }

    record(check_euler_rate);
    record(check_barrier_floor);
    record(check_regime_degradation);
    record(check_decomposition);
    record(check_determinism);
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace hbl::acceptance
