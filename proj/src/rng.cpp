#include "hbl/rng.hpp"

#include <cmath>

namespace hbl::rng {

namespace {

// Rational approximations from Wichura (1988), Applied Statistics 37(3),
// algorithm AS 241, routine PPND16.
constexpr double kA[8] = {3.3871328727963666080e0,  1.3314166789178437745e2,
                          1.9715909503065514427e3,  1.3731693765509461125e4,
                          4.5921953931549871457e4,  6.7265770927008700853e4,
                          3.3430575583588128105e4,  2.5090809287301226727e3};
constexpr double kB[8] = {1.0,                      4.2313330701600911252e1,
                          6.8718700749205790830e2,  5.3941960214247511077e3,
                          2.1213794301586595867e4,  3.9307895800092710610e4,
                          2.8729085735721942674e4,  5.2264952788528545610e3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                          5.76949722146069140550e0, 3.64784832476320460504e0,
                          1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,                      2.05319162663775882187e0,
                          1.67638483018380384940e0, 6.89767334985100004550e-1,
                          1.48103976427480074590e-1, 1.51986665636164571966e-2,
                          5.47593808499534494600e-4, 1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                          1.78482653991729133580e0, 2.96560571828504891230e-1,
                          2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,                      5.99832206555887937690e-1,
                          1.36929880922735805310e-1, 1.48753612908506148525e-2,
                          7.86869131145613259100e-4, 1.84631831751005468180e-5,
                          1.42151175831644588870e-7, 2.04426310338993978564e-15};

inline double horner8(const double (&c)[8], double r) noexcept {
    return ((((((c[7] * r + c[6]) * r + c[5]) * r + c[4]) * r + c[3]) * r + c[2]) * r + c[1]) * r +
           c[0];
}

} // namespace

double inverse_normal_cdf(double p) noexcept {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner8(kA, r) / horner8(kB, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = horner8(kC, r) / horner8(kD, r);
    } else {
        r -= 5.0;
        x = horner8(kE, r) / horner8(kF, r);
    }
    return q < 0.0 ? -x : x;
}

void fill_normal_pairs(std::uint64_t seed, std::uint64_t stream, std::span<double> a,
                       std::span<double> b, std::uint64_t first_block) {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    const auto s_lo = static_cast<std::uint32_t>(stream);
    const auto s_hi = static_cast<std::uint32_t>(stream >> 32);
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t blk = first_block + i;
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32), s_lo, s_hi},
            key);
        a[i] = inverse_normal_cdf(CounterStream::to_unit(out[0] | (std::uint64_t{out[1]} << 32)));
        b[i] = inverse_normal_cdf(CounterStream::to_unit(out[2] | (std::uint64_t{out[3]} << 32)));
    }
}

void fill_normals(std::uint64_t seed, std::uint64_t stream, std::span<double> out) {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32)};
    const auto s_lo = static_cast<std::uint32_t>(stream);
    const auto s_hi = static_cast<std::uint32_t>(stream >> 32);
    for (std::size_t b = 0; b * 2 < out.size(); ++b) {
        const auto o = Philox4x32::block(
            {static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(std::uint64_t{b} >> 32),
             s_lo, s_hi},
            key);
        out[2 * b] = inverse_normal_cdf(CounterStream::to_unit(o[0] | (std::uint64_t{o[1]} << 32)));
        if (2 * b + 1 < out.size())
            out[2 * b + 1] =
                inverse_normal_cdf(CounterStream::to_unit(o[2] | (std::uint64_t{o[3]} << 32)));
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    std::uint64_t z = (seed ^ (tag * 0xBF58476D1CE4E5B9ull)) + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::int64_t sample_poisson(CounterStream& s, double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) {
        // Knuth inversion: product of uniforms against exp(-mean).
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double prod = s.next_uniform();
        while (prod > limit) {
            ++k;
            prod *= s.next_uniform();
        }
        return k;
    }
    // Hormann (1993) PTRS transformed rejection, exact for mean >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = s.next_uniform() - 0.5;
        double v = s.next_uniform();
        const double us = 0.5 - std::abs(u);
        const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            static_cast<double>(k) * log_mean - mean - std::lgamma(static_cast<double>(k) + 1.0))
            return k;
    }
}

double sample_gamma(CounterStream& s, double shape) {
    if (shape <= 0.0) return 0.0;
    if (shape < 1.0) {
        // Boost to shape+1, then scale back by U^{1/shape}.
        const double u = s.next_uniform();
        return sample_gamma(s, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = s.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = s.next_uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace hbl::rng
