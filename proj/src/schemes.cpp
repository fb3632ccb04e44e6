#include "hbl/schemes.hpp"

#include <cmath>
#include <stdexcept>

namespace hbl {

EulerState euler_step(EulerState s, double dWk, double dBk, double dt, const HestonParams& p) {
    if (dt == 0.0) return s;
    const double vplus = s.v > 0.0 ? s.v : 0.0;
    const double root = std::sqrt(vplus);
    const double dZ = p.rho * dWk + std::sqrt(1.0 - p.rho * p.rho) * dBk;
    return {s.x + (p.mu - 0.5 * vplus) * dt + root * dZ,
            s.v + p.kappa * (p.theta - vplus) * dt + p.sigma * root * dWk};
}

SchemeTrajectory run_euler(const HestonParams& p, const TimeGrid& grid,
                           std::span<const double> dW, std::span<const double> dB) {
    const auto n = static_cast<std::size_t>(grid.steps());
    if (dW.size() != n || dB.size() != n)
        throw std::invalid_argument("increment arrays must match the grid");
    SchemeTrajectory traj{grid, std::vector<double>(n + 1), std::vector<double>(n + 1),
                          SchemeTag::euler_full_truncation};
    EulerState s{p.x0, p.v0};
    traj.xhat[0] = s.x;
    traj.vhat[0] = s.v;
    const double dt = grid.dt();
    for (std::size_t k = 0; k < n; ++k) {
        s = euler_step(s, dW[k], dB[k], dt, p);
        traj.xhat[k + 1] = s.x;
        traj.vhat[k + 1] = s.v;
    }
    return traj;
}

double drift_implicit_sqrt_step(double u, double dWk, double dt, const HestonParams& p) {
    if (p.feller_index() <= 0.5)
        throw std::domain_error("drift-implicit sqrt scheme requires Feller index > 1/2");
    if (dt == 0.0) return u;
    const double q = 0.5 * p.kappa * p.theta - 0.125 * p.sigma * p.sigma; // > 0 iff nu > 1/2
    const double denom = 1.0 + 0.5 * p.kappa * dt;
    const double a = (u + 0.5 * p.sigma * dWk) / (2.0 * denom);
    return a + std::sqrt(a * a + q * dt / denom);
}

SchemeTrajectory run_reference(const HestonParams& p, const TimeGrid& grid,
                               std::span<const double> dW, std::span<const double> dB) {
    const auto n = static_cast<std::size_t>(grid.steps());
    if (dW.size() != n || dB.size() != n)
        throw std::invalid_argument("increment arrays must match the grid");
    if (p.feller_index() <= 0.5) return run_euler(p, grid, dW, dB);

    SchemeTrajectory traj{grid, std::vector<double>(n + 1), std::vector<double>(n + 1),
                          SchemeTag::drift_implicit_sqrt};
    const double dt = grid.dt();
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);
    double u = std::sqrt(p.v0);
    double x = p.x0;
    traj.xhat[0] = x;
    traj.vhat[0] = p.v0;
    for (std::size_t k = 0; k < n; ++k) {
        const double v = u * u;
        x += (p.mu - 0.5 * v) * dt + u * (p.rho * dW[k] + rho_c * dB[k]);
        u = drift_implicit_sqrt_step(u, dW[k], dt, p);
        traj.xhat[k + 1] = x;
        traj.vhat[k + 1] = u * u;
    }
    return traj;
}

double cir_exact_transition(double v, double dt, const HestonParams& p, rng::CounterStream& s) {
    if (v < 0.0) throw std::invalid_argument("exact CIR transition needs v >= 0");
    if (dt == 0.0) return v;
    const double em = std::exp(-p.kappa * dt);
    const double scale = p.sigma * p.sigma * (1.0 - em) / (4.0 * p.kappa);
    const double degrees = 2.0 * p.feller_index();
    const double lambda = v * em / scale;
    const std::int64_t k = rng::sample_poisson(s, 0.5 * lambda);
    return scale * 2.0 * rng::sample_gamma(s, 0.5 * degrees + static_cast<double>(k));
}

} // namespace hbl
