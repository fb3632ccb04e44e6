#include "hbl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hbl::stats {

MeanSe mean_se(std::span<const double> values) {
    const auto n = values.size();
    if (n == 0) return {};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

MeanSe batch_mean_se(std::span<const double> values, int batches) {
    const auto n = static_cast<std::int64_t>(values.size());
    if (n == 0) return {};
    if (batches < 2 || n < batches) return mean_se(values);
    double total = 0.0;
    std::vector<double> bmeans(static_cast<std::size_t>(batches));
    for (int b = 0; b < batches; ++b) {
        const std::int64_t lo = n * b / batches;
        const std::int64_t hi = n * (b + 1) / batches;
        double s = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) s += values[static_cast<std::size_t>(i)];
        total += s;
        bmeans[static_cast<std::size_t>(b)] = s / static_cast<double>(hi - lo);
    }
    const double mean = total / static_cast<double>(n);
    double ss = 0.0;
    for (double bm : bmeans) ss += (bm - mean) * (bm - mean);
    const double var_bm = ss / static_cast<double>(batches - 1);
    return {mean, std::sqrt(var_bm / static_cast<double>(batches))};
}

double sample_variance(std::span<const double> values) {
    const auto n = values.size();
    if (n < 2) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(n - 1);
}

double sample_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("correlation needs two equal-length samples");
    const auto n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return sab / std::sqrt(saa * sbb);
}

double two_sample_ks(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS needs non-empty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double step_a = 1.0 / static_cast<double>(sa.size());
    const double step_b = 1.0 / static_cast<double>(sb.size());
    std::size_t ia = 0, ib = 0;
    double cdf_a = 0.0, cdf_b = 0.0, d = 0.0;
    while (ia < sa.size() && ib < sb.size()) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= x) {
            ++ia;
            cdf_a += step_a;
        }
        while (ib < sb.size() && sb[ib] <= x) {
            ++ib;
            cdf_b += step_b;
        }
        d = std::max(d, std::abs(cdf_a - cdf_b));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    // c(alpha) = sqrt(-ln(alpha/2)/2); 1.628 at the 1% level.
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least squares needs two equal-length arrays, size >= 2");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("least squares needs distinct x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

namespace {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on (0,1), symmetric half omitted
    std::vector<double> weights;
};

// Newton iteration on P_n (Numerical Recipes style gauleg); nodes on [-1,1].
GaussLegendreRule make_rule(int n) {
    GaussLegendreRule rule;
    const int m = (n + 1) / 2;
    rule.nodes.resize(static_cast<std::size_t>(m));
    rule.weights.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

double gauss_legendre(double a, double b, const std::function<double(double)>& f, int nodes) {
    static const GaussLegendreRule rule64 = make_rule(64);
    const GaussLegendreRule local = nodes == 64 ? GaussLegendreRule{} : make_rule(nodes);
    const GaussLegendreRule& rule = nodes == 64 ? rule64 : local;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    const bool odd = nodes % 2 != 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double dx = half * rule.nodes[i];
        if (odd && i + 1 == rule.nodes.size() && rule.nodes[i] < 1e-14)
            s += rule.weights[i] * f(mid);
        else
            s += rule.weights[i] * (f(mid - dx) + f(mid + dx));
    }
    return s * half;
}

} // namespace hbl::stats
