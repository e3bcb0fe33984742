#pragma once

#include "aldar/estimation.hpp"

namespace aldar {

struct ResidualAcfs {
    Vec rho;    // residual ACF at lags 1..M
    Vec gamma;  // absolute-residual ACF at lags 1..M
};

/// Sample ACFs of the residuals and of their absolute values. Throws Numeric
/// (degenerate input) when either series has zero variance.
ResidualAcfs residual_acfs(const Vec& residuals, int M);

/// Estimate of V G V', the asymptotic covariance of sqrt(n) (rho', gamma')'.
Mat acf_covariance(const FitResult& fit, const Regressors& reg, int M);

struct AcfReport {
    int M = 0;
    Vec rho_hat;
    Vec gamma_hat;
    Mat cov;         // V G V' / n
    Vec band_rho;    // 95% half-widths 1.96 sqrt(diag(cov))
    Vec band_gamma;
    double q_stat = 0.0;
    double p_value = 1.0;
    int df = 0;
};

/// Mixed portmanteau test Q(M) = n z' (V G V')^-1 z against chi2_{2M}.
AcfReport portmanteau(const FitResult& fit, const Regressors& reg, int M);

}  // namespace aldar
