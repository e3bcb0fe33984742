#include "aldar/asymtest.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "aldar/error.hpp"
#include "aldar/stats.hpp"

namespace aldar {

Mat restriction_matrix(int p) {
    Mat r = Mat::Zero(p, 3 * p + 1);
    r.block(0, p + 1, p, p).setIdentity();
    r.block(0, 2 * p + 1, p, p) = -Mat::Identity(p, p);
    return r;
}

TestResult wald_test(const FitResult& fit) {
    const int p = fit.order();
    const Mat r = restriction_matrix(p);
    const Vec diff = r * fit.theta_hat.flatten();
    const Mat inner = inverse_spd(r * fit.xi_hat * r.transpose(), "R Xi R'");
    TestResult out;
    out.statistic = std::max(0.0, fit.n * diff.dot(inner * diff));
    out.p_value = chi2_sf(out.statistic, p);
    return out;
}

TestResult lm_test(const FitResult& restricted, const Regressors& reg) {
    const int p = restricted.order();
    require(reg.order() == p, "regressors and fit disagree on the order");
    const Mat r = restriction_matrix(p);
    const Vec s = score(restricted.theta_hat.flatten(), reg);
    const Mat sigma_inv = inverse_spd(restricted.sigma_hat, "restricted Sigma");
    const Mat inner = inverse_spd(r * restricted.xi_hat * r.transpose(), "R Xi~ R'");
    const Vec u = r * (sigma_inv * s);
    TestResult out;
    out.statistic = std::max(0.0, u.dot(inner * u) / restricted.n);
    out.p_value = chi2_sf(out.statistic, p);
    return out;
}

PsiMatrices psi_matrices(const FitResult& fit) {
    const int p = fit.order();
    const Mat r = restriction_matrix(p);
    PsiMatrices out;
    out.delta = r * inverse_spd(fit.sigma_hat, "Sigma") * r.transpose();
    out.delta = 0.5 * (out.delta + out.delta.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(out.delta);
    if (es.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigen-decomposition of Delta failed");
    const Vec inv_sqrt = es.eigenvalues().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    const Mat d_inv_half = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
    out.psi = d_inv_half * (r * fit.xi_hat * r.transpose()) * d_inv_half;
    out.psi = 0.5 * (out.psi + out.psi.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> ps(out.psi, Eigen::EigenvaluesOnly);
    if (ps.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigen-decomposition of Psi failed");
    out.eigenvalues = ps.eigenvalues().cwiseMax(0.0);
    return out;
}

double pearson_pvalue(const Vec& e, double q) {
    require(e.size() > 0 && (e.array() >= 0.0).all(), "weights must be nonnegative");
    require(q >= 0.0, "observed statistic must be nonnegative");
    const double c1 = e.sum();
    const double c2 = e.array().square().sum();
    const double c3 = e.array().cube().sum();
    require(c2 > 0.0, "all weights are zero");
    const double l = c2 * c2 * c2 / (c3 * c3);
    const double x = (q - c1) * std::sqrt(2.0 * l) / std::sqrt(2.0 * c2) + l;
    return chi2_sf(std::max(0.0, x), l);
}

QlrResult qlr_test(const FitResult& restricted, const FitResult& unrestricted, PsiSource source) {
    const int p = restricted.order();
    require(unrestricted.order() == p && unrestricted.n == restricted.n, "fits must share data and order");
    double q = -2.0 * (restricted.loglik - unrestricted.loglik);
    if (q < 0.0) {
        const double slack = 1e-8 * (restricted.n - p);
        if (q < -slack) {
            std::ostringstream os;
            os << "QLR statistic " << q << " is negative: unrestricted fit is worse than restricted";
            fail(ErrorKind::Numeric, os.str());
        }
        q = 0.0;
    }
    QlrResult out;
    out.statistic = q;
    out.eigenvalues = psi_matrices(source == PsiSource::Restricted ? restricted : unrestricted).eigenvalues;
    out.p_value = pearson_pvalue(out.eigenvalues, q);
    return out;
}

ModelParams local_alternative_dgp(const ModelParams& theta0, const Vec& h, int n, const ParamBounds& bounds) {
    require(h.size() == theta0.dim(), "h must have length 3p+1");
    require(n > 0, "n must be positive");
    const ModelParams out = ModelParams::unflatten(theta0.flatten() + h / std::sqrt(static_cast<double>(n)));
    if (!bounds.contains(out)) fail(ErrorKind::Usage, "local alternative leaves the parameter space");
    return out;
}

AsymmetryFits fit_both(const Regressors& reg, const ParamBounds& bounds, const FitOptions& options) {
    AsymmetryFits fits{fit_restricted(reg, bounds, options), {}};
    FitOptions seeded = options;
    seeded.extra_starts.push_back(fits.restricted.theta_hat);
    fits.unrestricted = fit_qmle(reg, bounds, seeded);
    return fits;
}

AsymmetryTestReport asymmetry_tests(const AsymmetryFits& fits, const Regressors& reg, PsiSource source) {
    AsymmetryTestReport rep;
    rep.p = fits.unrestricted.order();
    rep.wald = wald_test(fits.unrestricted);
    rep.lm = lm_test(fits.restricted, reg);
    rep.qlr = qlr_test(fits.restricted, fits.unrestricted, source);
    const PsiMatrices pm = psi_matrices(source == PsiSource::Restricted ? fits.restricted : fits.unrestricted);
    rep.delta = pm.delta;
    rep.psi = pm.psi;
    return rep;
}

}  // namespace aldar
