#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aldar/innovation.hpp"

namespace aldar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Parameters of the asymmetric linear double autoregression of order p:
///
///   y_t = sum_i alpha_i y_{t-i} + eta_t (omega + sum_i (beta+_i y+_{t-i} - beta-_i y-_{t-i}))
///
/// with y+ = max(0, y) and y- = min(0, y). The flat layout is
/// (alpha_1..alpha_p, omega, beta+_1..beta+_p, beta-_1..beta-_p).
struct ModelParams {
    Vec alpha;
    double omega = 1.0;
    Vec beta_plus;
    Vec beta_minus;

    ModelParams() = default;
    ModelParams(Vec alpha, double omega, Vec beta_plus, Vec beta_minus);

    [[nodiscard]] int order() const noexcept { return static_cast<int>(alpha.size()); }
    [[nodiscard]] int dim() const noexcept { return 3 * order() + 1; }

    [[nodiscard]] Vec flatten() const;
    static ModelParams unflatten(const Vec& theta);

    /// Throws Usage when the invariants (omega > 0, betas >= 0, matching lengths) fail.
    void validate() const;
};

/// Compact parameter space used by the estimators.
struct ParamBounds {
    double omega_lo = 1e-4;
    double omega_hi = 1e4;
    double beta_lo = 1e-6;
    double beta_hi = 1e2;
    double alpha_abs_max = 10.0;

    void validate() const;
    [[nodiscard]] Vec lower(int p) const;
    [[nodiscard]] Vec upper(int p) const;
    [[nodiscard]] bool contains(const ModelParams& params) const;
    [[nodiscard]] ParamBounds scaled(double c) const;  // omega range times c
};

struct SeriesSample {
    std::vector<double> values;
    std::string name;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    void validate(int p) const;
};

struct MeanScale {
    double mu;
    double sigma;
};

/// Conditional mean and scale given lags ordered most-recent-first.
MeanScale cond_mean_scale(const ModelParams& params, std::span<const double> lags);

inline constexpr double kExplosiveThreshold = 1e12;

/// n observations after `burn_in` discarded steps, started from a zero lag
/// vector. Innovations are drawn one per step in time order from `rng`.
SeriesSample simulate(const ModelParams& params, const InnovationSpec& innov, std::size_t n, std::size_t burn_in,
                      std::uint64_t seed);
SeriesSample simulate(const ModelParams& params, const InnovationSpec& innov, std::size_t n, std::size_t burn_in,
                      Rng& rng);

}  // namespace aldar
