#include "hbl/params.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hbl {

HestonParams::HestonParams(double mu_, double kappa_, double theta_, double sigma_, double rho_,
                           double x0_, double v0_, double T_)
    : mu(mu_), kappa(kappa_), theta(theta_), sigma(sigma_), rho(rho_), x0(x0_), v0(v0_), T(T_) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be strictly positive");
    };
    positive(kappa, "kappa");
    positive(theta, "theta");
    positive(sigma, "sigma");
    positive(v0, "v0");
    positive(T, "T");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument("rho must lie in [-1, 1]");
    if (!std::isfinite(mu) || !std::isfinite(x0))
        throw std::invalid_argument("mu and x0 must be finite");
}

double feller_index(const HestonParams& p) noexcept { return p.feller_index(); }

CirMoments cir_marginal_moments(const HestonParams& p, double t) {
    if (!(t >= 0.0) || t > p.T)
        throw std::invalid_argument("t must lie in [0, T]");
    const double e1 = std::exp(-p.kappa * t);
    const double e2 = std::exp(-2.0 * p.kappa * t);
    const double s2 = p.sigma * p.sigma;
    CirMoments m;
    m.mean = p.theta + (p.v0 - p.theta) * e1;
    m.variance = p.v0 * (s2 / p.kappa) * (e1 - e2) +
                 p.theta * (s2 / (2.0 * p.kappa)) * (1.0 - e1) * (1.0 - e1);
    return m;
}

HestonParams preset_params(std::string_view name) {
    // mu = 0, rho = 0.5, x0 = 0, v0 = 0.04, T = 1 across the presets; only
    // the variance coefficients move the Feller index.
    if (name == "high") return HestonParams(0.0, 3.0, 0.04, 0.3, 0.5, 0.0, 0.04, 1.0);
    if (name == "unit") return HestonParams(0.0, 2.0, 0.04, 0.4, 0.5, 0.0, 0.04, 1.0);
    if (name == "low") return HestonParams(0.0, 0.75, 0.04, std::sqrt(0.1), 0.5, 0.0, 0.04, 1.0);
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected high, unit or low)");
}

HestonParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open parameter file '" + path + "'");
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string key, eq, rest;
        std::istringstream ls(line);
        if (auto pos = line.find('='); pos != std::string::npos) {
            key = line.substr(0, pos);
            rest = line.substr(pos + 1);
        } else {
            std::istringstream probe(line);
            std::string tok;
            if (!(probe >> tok)) continue; // blank line
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        }
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(rest);
        if (key.empty() && rest.empty()) continue;
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (key.empty() || used != rest.size())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value with numeric value");
        kv[key] = value;
    }
    auto need = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument(path + ": missing key '" + key + "'");
        return it->second;
    };
    return HestonParams(need("mu"), need("kappa"), need("theta"), need("sigma"), need("rho"),
                        need("x0"), need("v0"), need("T"));
}

} // namespace hbl
