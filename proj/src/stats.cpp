#include "aldar/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "aldar/error.hpp"

namespace aldar {

double chi2_sf(double x, double df) {
    require(df > 0.0, "chi-square degrees of freedom must be positive");
    if (!(x > 0.0)) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi2_critical(double level, double df) {
    require(level > 0.0 && level < 1.0, "level must lie in (0,1)");
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared_distribution<double>(df), level));
}

double quantile_type7(std::span<const double> values, double tau) {
    require(!values.empty(), "quantile of an empty sample");
    require(tau >= 0.0 && tau <= 1.0, "quantile level must lie in [0,1]");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * tau;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(std::span<const double> values) {
    require(!values.empty(), "mean of an empty sample");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
    require(values.size() > 1, "standard deviation needs two values");
    const double m = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size() - 1));
}

double kolmogorov_sf(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace aldar
