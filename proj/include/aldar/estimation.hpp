#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aldar/likelihood.hpp"
#include "aldar/optimizer.hpp"

namespace aldar {

struct FitOptions {
    int n_starts = 5;  // one data-driven start plus n_starts - 1 jittered copies
    std::uint64_t seed = 20210901;
    NewtonOptions newton;  // pg_tol is on the gradient of -L_n / (n - p)
    std::vector<ModelParams> extra_starts;
};

struct InfoMatrices {
    Mat sigma;  // average of blockdiag(YY'/(b'X)^2, 2XX'/(b'X)^2)
    Mat omega;  // average score outer product
    Mat xi;     // sigma^-1 omega sigma^-1
};

struct FitResult {
    ModelParams theta_hat;
    double loglik = 0.0;
    Mat sigma_hat;
    Mat omega_hat;
    Mat xi_hat;
    Vec asd;  // sqrt(diag(xi_hat) / n)
    Vec residuals;
    bool converged = false;
    int iterations = 0;
    bool restricted = false;
    double pg_norm = 0.0;  // projected gradient norm of -L_n/(n-p) at theta_hat
    int best_start = 0;
    int n = 0;  // series length
    std::vector<NewtonStep> trace;

    [[nodiscard]] int order() const noexcept { return theta_hat.order(); }
};

struct ResidualMoments {
    double kappa1;
    double kappa2;
    double tau1;
    double tau2;
};

ResidualMoments residual_moments(const Vec& residuals);

/// Sample-average information matrices at theta. Without `moments` the score
/// outer product is used for omega; with (kappa1, kappa2) the block formula
/// E[(YY', k1 YX'; k1 XY', k2 XX') / (b'X)^2] is averaged instead.
InfoMatrices info_matrices(const Vec& theta, const Regressors& reg,
                           std::optional<std::pair<double, double>> moments = std::nullopt);

/// Inverse of a symmetric positive definite matrix; throws Numeric when the
/// reciprocal condition number falls below 1e-12.
Mat inverse_spd(const Mat& m, const char* what);

/// Least-squares AR(p) for alpha, then |residual| regressed on X_{t-1} for
/// (omega, beta), clipped into the box.
Vec data_driven_start(const Regressors& reg, const ParamBounds& bounds);

FitResult fit_qmle(const Regressors& reg, const ParamBounds& bounds = {}, const FitOptions& options = {});
FitResult fit_qmle(const SeriesSample& series, int p, const ParamBounds& bounds = {}, const FitOptions& options = {});

/// QMLE under beta+_i = beta-_i, fitted in the (2p+1)-dimensional
/// parameterization omega + sum_i b_i |y_{t-i}| and mapped back.
FitResult fit_restricted(const Regressors& reg, const ParamBounds& bounds = {}, const FitOptions& options = {});
FitResult fit_restricted(const SeriesSample& series, int p, const ParamBounds& bounds = {},
                         const FitOptions& options = {});

/// (3p+1) x (2p+1) map from (alpha, omega, b) to the full layout.
Mat restriction_embedding(int p);

}  // namespace aldar
