#pragma once

#include <span>
#include <vector>

namespace aldar {

/// P(chi2_df > x) for real df > 0; 1 for x <= 0.
double chi2_sf(double x, double df);

/// Upper-tail critical value: P(chi2_df > c) = level.
double chi2_critical(double level, double df);

/// Type-7 (linear interpolation) sample quantile.
double quantile_type7(std::span<const double> values, double tau);

double mean(std::span<const double> values);
/// Sample standard deviation with divisor n - 1.
double stddev(std::span<const double> values);

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF, and its
/// asymptotic p-value.
struct KsResult {
    double statistic;
    double p_value;
};
template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf);
double kolmogorov_sf(double lambda);

}  // namespace aldar

#include <algorithm>
#include <cmath>

namespace aldar {

template <class Cdf>
KsResult ks_test(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sq = std::sqrt(n);
    return {d, kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d)};
}

}  // namespace aldar
