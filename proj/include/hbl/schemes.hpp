#pragma once

#include <span>
#include <vector>

#include "hbl/grid.hpp"
#include "hbl/params.hpp"
#include "hbl/rng.hpp"

namespace hbl {

enum class SchemeTag {
    euler_full_truncation,
    drift_implicit_sqrt,
};

// Discrete (x, v) states of one scheme run. vhat may go negative for the
// full-truncation scheme; the drift-implicit scheme keeps vhat > 0.
struct SchemeTrajectory {
    TimeGrid grid;
    std::vector<double> xhat;
    std::vector<double> vhat;
    SchemeTag tag = SchemeTag::euler_full_truncation;
};

struct EulerState {
    double x;
    double v;
};

// One step of the full-truncation Euler scheme. With v+ = max(v, 0):
//   x' = x + (mu - v+/2) dt + sqrt(v+) (rho dWk + sqrt(1-rho^2) dBk)
//   v' = v + kappa (theta - v+) dt + sigma sqrt(v+) dWk
// v' is stored untruncated; truncation applies only where v+ is read.
// dt == 0 returns the state unchanged.
EulerState euler_step(EulerState s, double dWk, double dBk, double dt, const HestonParams& p);

// Runs the recursion over the whole grid. Throws std::invalid_argument when
// the increment arrays do not match the grid.
SchemeTrajectory run_euler(const HestonParams& p, const TimeGrid& grid,
                           std::span<const double> dW, std::span<const double> dB);

// Drift-implicit Euler step for U = sqrt(V), whose SDE has additive noise
// sigma/2 and drift (kappa theta/2 - sigma^2/8)/U - kappa U/2. The implicit
// equation
//   u' = u + ((kappa theta/2 - sigma^2/8)/u' - kappa u'/2) dt + sigma/2 dWk
// has the unique positive root
//   a  = (u + sigma/2 dWk) / (2 (1 + kappa dt/2))
//   u' = a + sqrt(a^2 + (kappa theta/2 - sigma^2/8) dt / (1 + kappa dt/2)),
// which requires the Feller index to exceed 1/2. dt == 0 returns u.
double drift_implicit_sqrt_step(double u, double dWk, double dt, const HestonParams& p);

// Fine-grid strong reference: V from the drift-implicit sqrt scheme (so
// vhat = u^2 > 0), X from the left-point log-Euler recursion on top of it.
// For Feller index <= 1/2 the V-scheme hypothesis fails and the run falls
// back to full-truncation Euler; the fallback is visible in the tag.
SchemeTrajectory run_reference(const HestonParams& p, const TimeGrid& grid,
                               std::span<const double> dW, std::span<const double> dB);

// Exact sample of V_{t+dt} | V_t = v via the noncentral chi-square
// transition: scale = sigma^2 (1-e^{-kappa dt})/(4 kappa), degrees
// d = 4 kappa theta/sigma^2, noncentrality lam = 4 kappa e^{-kappa dt}
// v / (sigma^2 (1-e^{-kappa dt})); the draw is Gamma(d/2 + K, 2) * scale
// with K ~ Poisson(lam/2). Consumes a variable number of stream variates.
double cir_exact_transition(double v, double dt, const HestonParams& p, rng::CounterStream& s);

} // namespace hbl
