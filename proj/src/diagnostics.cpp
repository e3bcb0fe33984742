#include "aldar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aldar/error.hpp"
#include "aldar/stats.hpp"

namespace aldar {

namespace {

Vec acf(const Vec& x, int M, const char* what) {
    const Vec c = x.array() - x.mean();
    const double denom = c.squaredNorm();
    if (!(denom > 1e-24 * x.squaredNorm()))
        fail(ErrorKind::Numeric, std::string("degenerate input: ") + what + " have zero variance");
    Vec out(M);
    const Eigen::Index n = x.size();
    for (int k = 1; k <= M; ++k) out(k - 1) = c.tail(n - k).dot(c.head(n - k)) / denom;
    return out;
}

}  // namespace

ResidualAcfs residual_acfs(const Vec& residuals, int M) {
    require(M >= 1, "M must be positive");
    require(residuals.size() > M + 1, "need more residuals than M + 1");
    return {acf(residuals, M, "residuals"), acf(residuals.cwiseAbs(), M, "absolute residuals")};
}

Mat acf_covariance(const FitResult& fit, const Regressors& reg, int M) {
    require(M >= 1, "M must be positive");
    const int p = fit.order();
    require(reg.order() == p, "regressors and fit disagree on the order");
    const Eigen::Index N = reg.rows();
    const int d = 3 * p + 1;
    require(N > 2 * M + d, "series too short for this M");
    if (!fit.converged) fail(ErrorKind::Convergence, "diagnostics need a converged fit");

    const Vec theta = fit.theta_hat.flatten();
    const Vec beta = theta.segment(p, 2 * p + 1);
    const Vec s = reg.x_lag * beta;
    const Vec eta = residuals(theta, reg);
    const Vec abs_eta = eta.cwiseAbs();
    const double tau1 = eta.unaryExpr([](double v) { return static_cast<double>((v > 0) - (v < 0)); }).mean();
    const double tau2 = abs_eta.mean();
    const Vec xi = abs_eta.array() - tau2;
    const double var_xi = xi.squaredNorm() / static_cast<double>(N);
    if (!(var_xi > 0.0)) fail(ErrorKind::Numeric, "degenerate input: absolute residuals have zero variance");

    // U_rho and U_gamma, averaged over the rows where lag k is available.
    Mat u_rho = Mat::Zero(M, d);
    Mat u_gamma = Mat::Zero(M, d);
    const RowMat y_s = reg.y_lag.array().colwise() / s.array();
    const RowMat x_s = reg.x_lag.array().colwise() / s.array();
    for (int k = 1; k <= M; ++k) {
        const Eigen::Index cnt = N - k;
        const auto eta_lag = eta.head(cnt);
        const auto xi_lag = xi.head(cnt);
        u_rho.row(k - 1).head(p) = -(y_s.bottomRows(cnt).transpose() * eta_lag) / static_cast<double>(cnt);
        u_gamma.row(k - 1).head(p) = -tau1 * (y_s.bottomRows(cnt).transpose() * xi_lag) / static_cast<double>(cnt);
        u_gamma.row(k - 1).tail(2 * p + 1) =
            -tau2 * (x_s.bottomRows(cnt).transpose() * xi_lag) / static_cast<double>(cnt);
    }

    Mat v_mat = Mat::Zero(2 * M, 2 * M + d);
    v_mat.block(0, 0, M, M).setIdentity();
    v_mat.block(M, M, M, M).setIdentity();
    v_mat.block(0, 2 * M, M, d) = u_rho;
    v_mat.block(M, 2 * M, M, d) = u_gamma / var_xi;

    // v_t rows; entries whose lag reaches before the first residual stay zero.
    const int m = 2 * M + d;
    Mat vt = Mat::Zero(N, m);
    std::vector<int> lag(m, 0);
    for (int k = 1; k <= M; ++k) {
        lag[k - 1] = lag[M + k - 1] = k;
        vt.col(k - 1).tail(N - k) = eta.tail(N - k).cwiseProduct(eta.head(N - k));
        vt.col(M + k - 1).tail(N - k) = xi.tail(N - k).cwiseProduct(xi.head(N - k)) / var_xi;
    }
    const Mat sigma_inv = inverse_spd(fit.sigma_hat, "Sigma");
    vt.rightCols(d) = score_rows(theta, reg) * sigma_inv;
    Mat g = vt.transpose() * vt;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) /= static_cast<double>(N - std::max(lag[i], lag[j]));

    Mat out = v_mat * g * v_mat.transpose();
    return 0.5 * (out + out.transpose());
}

AcfReport portmanteau(const FitResult& fit, const Regressors& reg, int M) {
    AcfReport rep;
    rep.M = M;
    rep.df = 2 * M;
    const Mat vgv = acf_covariance(fit, reg, M);
    const Vec eta = residuals(fit.theta_hat.flatten(), reg);
    const ResidualAcfs a = residual_acfs(eta, M);
    rep.rho_hat = a.rho;
    rep.gamma_hat = a.gamma;
    const double n = static_cast<double>(reg.series_length());
    rep.cov = vgv / n;
    const Vec band = 1.96 * rep.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    rep.band_rho = band.head(M);
    rep.band_gamma = band.tail(M);
    Vec z(2 * M);
    z << a.rho, a.gamma;
    const Mat inv = inverse_spd(vgv, "V G V'");
    rep.q_stat = std::max(0.0, n * z.dot(inv * z));
    rep.p_value = chi2_sf(rep.q_stat, rep.df);
    return rep;
}

}  // namespace aldar
