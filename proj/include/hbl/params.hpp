#pragma once

#include <string>
#include <string_view>

namespace hbl {

// Coefficients of the log-Heston SDE
//   dX = (mu - V/2) dt + sqrt(V) (rho dW + sqrt(1-rho^2) dB)
//   dV = kappa (theta - V) dt + sigma sqrt(V) dW
// on [0,T], with deterministic X_0 = x0, V_0 = v0.
//
// Validation happens once, at construction; everything downstream assumes a
// valid parameter set. Immutable after construction, safe to share across
// threads.
struct HestonParams {
    double mu;
    double kappa;
    double theta;
    double sigma;
    double rho;
    double x0;
    double v0;
    double T;

    // Throws std::invalid_argument on kappa/theta/sigma/v0/T <= 0 or |rho| > 1.
    HestonParams(double mu, double kappa, double theta, double sigma, double rho, double x0,
                 double v0, double T);

    double feller_index() const noexcept { return 2.0 * kappa * theta / (sigma * sigma); }
};

double feller_index(const HestonParams& p) noexcept;

struct CirMoments {
    double mean;
    double variance;
};

// Closed-form mean and variance of V_t given V_0 = v0:
//   mean = theta + (v0-theta) e^{-kappa t}
//   var  = v0 sigma^2/kappa (e^{-kappa t} - e^{-2 kappa t})
//        + theta sigma^2/(2 kappa) (1 - e^{-kappa t})^2
CirMoments cir_marginal_moments(const HestonParams& p, double t);

// Named parameter sets used by the shipped experiments. Valid names:
// "high" (Feller index ~2.67), "unit" (1.0), "low" (0.6).
HestonParams preset_params(std::string_view name);

// Plain-text key=value file with keys mu, kappa, theta, sigma, rho, x0, v0, T.
// '#' starts a comment; all eight keys are required.
HestonParams load_params_file(const std::string& path);

} // namespace hbl
