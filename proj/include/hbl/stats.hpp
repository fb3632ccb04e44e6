#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hbl::stats {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Sample mean with the plain sqrt(M)-scaled standard error.
MeanSe mean_se(std::span<const double> values);

// Sample mean with a batch-means standard error: values are split into
// `batches` contiguous blocks in index order and the SE is the standard
// deviation of the block means over sqrt(batches). More robust than the
// per-sample estimator when the integrand has heavy tails.
MeanSe batch_mean_se(std::span<const double> values, int batches = 32);

double sample_variance(std::span<const double> values);
double sample_correlation(std::span<const double> a, std::span<const double> b);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
// Inputs are copied and sorted internally.
double two_sample_ks(std::span<const double> a, std::span<const double> b);

// Asymptotic critical value c(alpha) sqrt((n+m)/(nm)) of the two-sample KS
// statistic; alpha = 0.01 gives c = 1.628.
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.01);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of y against x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

// Gauss-Legendre quadrature of f over [a, b]. Nodes and weights are found
// by Newton iteration on the Legendre polynomial, accurate to machine
// precision for smooth integrands.
double gauss_legendre(double a, double b, const std::function<double(double)>& f, int nodes = 64);

} // namespace hbl::stats
