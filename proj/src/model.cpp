#include "aldar/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aldar/error.hpp"

namespace aldar {

ModelParams::ModelParams(Vec alpha_, double omega_, Vec beta_plus_, Vec beta_minus_)
    : alpha(std::move(alpha_)), omega(omega_), beta_plus(std::move(beta_plus_)), beta_minus(std::move(beta_minus_)) {
    validate();
}

Vec ModelParams::flatten() const {
    const int p = order();
    Vec theta(dim());
    theta.head(p) = alpha;
    theta(p) = omega;
    theta.segment(p + 1, p) = beta_plus;
    theta.tail(p) = beta_minus;
    return theta;
}

ModelParams ModelParams::unflatten(const Vec& theta) {
    require(theta.size() >= 4 && (theta.size() - 1) % 3 == 0, "parameter vector length must be 3p+1");
    const int p = static_cast<int>((theta.size() - 1) / 3);
    ModelParams out;
    out.alpha = theta.head(p);
    out.omega = theta(p);
    out.beta_plus = theta.segment(p + 1, p);
    out.beta_minus = theta.tail(p);
    return out;
}

void ModelParams::validate() const {
    require(order() >= 1, "model order must be positive");
    require(beta_plus.size() == alpha.size() && beta_minus.size() == alpha.size(),
            "alpha, beta+ and beta- must all have length p");
    require(std::isfinite(omega) && omega > 0.0, "omega must be positive");
    require(alpha.allFinite(), "alpha must be finite");
    require(beta_plus.allFinite() && beta_minus.allFinite(), "beta must be finite");
    require((beta_plus.array() >= 0.0).all() && (beta_minus.array() >= 0.0).all(), "beta must be nonnegative");
}

void ParamBounds::validate() const {
    require(omega_lo > 0.0 && omega_lo <= omega_hi, "invalid omega bounds");
    require(beta_lo > 0.0 && beta_lo <= beta_hi, "invalid beta bounds");
    require(alpha_abs_max > 0.0, "invalid alpha bound");
}

Vec ParamBounds::lower(int p) const {
    Vec lo(3 * p + 1);
    lo.head(p).setConstant(-alpha_abs_max);
    lo(p) = omega_lo;
    lo.tail(2 * p).setConstant(beta_lo);
    return lo;
}

Vec ParamBounds::upper(int p) const {
    Vec hi(3 * p + 1);
    hi.head(p).setConstant(alpha_abs_max);
    hi(p) = omega_hi;
    hi.tail(2 * p).setConstant(beta_hi);
    return hi;
}

bool ParamBounds::contains(const ModelParams& params) const {
    const Vec theta = params.flatten();
    const int p = params.order();
    return ((theta.array() >= lower(p).array()) && (theta.array() <= upper(p).array())).all();
}

ParamBounds ParamBounds::scaled(double c) const {
    ParamBounds out = *this;
    out.omega_lo *= c;
    out.omega_hi *= c;
    return out;
}

void SeriesSample::validate(int p) const {
    if (values.size() < static_cast<std::size_t>(p) + 2) {
        std::ostringstream os;
        os << "series '" << name << "' has " << values.size() << " observations; order " << p << " needs at least "
           << p + 2;
        fail(ErrorKind::Usage, os.str());
    }
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorKind::Usage, "series contains non-finite values");
}

MeanScale cond_mean_scale(const ModelParams& params, std::span<const double> lags) {
    const int p = params.order();
    double mu = 0.0;
    double sigma = params.omega;
    for (int i = 0; i < p; ++i) {
        const double y = lags[i];
        mu += params.alpha(i) * y;
        sigma += y > 0.0 ? params.beta_plus(i) * y : -params.beta_minus(i) * y;
    }
    return {mu, sigma};
}

SeriesSample simulate(const ModelParams& params, const InnovationSpec& innov, std::size_t n, std::size_t burn_in,
                      Rng& rng) {
    params.validate();
    require(burn_in >= 200, "burn-in must be at least 200");
    const int p = params.order();
    std::vector<double> lags(p, 0.0);
    SeriesSample out;
    out.values.reserve(n);
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        const auto [mu, sigma] = cond_mean_scale(params, lags);
        const double y = mu + innov.draw(rng) * sigma;
        if (!(std::abs(y) <= kExplosiveThreshold)) {
            std::ostringstream os;
            os << "explosive path: |y| exceeded " << kExplosiveThreshold << " at step " << t
               << " (parameters look nonstationary)";
            fail(ErrorKind::Numeric, os.str());
        }
        std::rotate(lags.rbegin(), lags.rbegin() + 1, lags.rend());
        lags[0] = y;
        if (t >= burn_in) out.values.push_back(y);
    }
    return out;
}

SeriesSample simulate(const ModelParams& params, const InnovationSpec& innov, std::size_t n, std::size_t burn_in,
                      std::uint64_t seed) {
    Rng rng(seed);
    return simulate(params, innov, n, burn_in, rng);
}

}  // namespace aldar
