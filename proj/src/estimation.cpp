#include "aldar/estimation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "aldar/error.hpp"

namespace aldar {
namespace {

// Full-layout vector to the fitted parameterization phi (identity unless restricted).
Vec to_phi(const Vec& theta, int p, bool restricted) {
    if (!restricted) return theta;
    Vec phi(2 * p + 1);
    phi.head(p + 1) = theta.head(p + 1);
    phi.tail(p) = 0.5 * (theta.segment(p + 1, p) + theta.tail(p));
    return phi;
}

Vec jitter(const Vec& theta, int p, std::uint64_t seed, int k) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> z(0.0, 1.0);
    Vec out = theta;
    for (int i = 0; i < p; ++i) out(i) += 0.1 * z(rng);
    out(p) *= std::exp(0.3 * z(rng));
    for (Eigen::Index j = p + 1; j < out.size(); ++j) out(j) = out(j) * std::exp(0.3 * z(rng)) + 0.02 * std::abs(z(rng));
    return out;
}

FitResult fit_impl(const Regressors& reg, const ParamBounds& bounds, const FitOptions& options, bool restricted) {
    bounds.validate();
    require(options.n_starts >= 1, "need at least one start");
    const int p = reg.order();
    require(reg.rows() > 3 * p + 1, "series too short for the requested order");
    const double nobs = static_cast<double>(reg.rows());
    const Mat embed = restricted ? restriction_embedding(p) : Mat::Identity(3 * p + 1, 3 * p + 1);

    const Vec lo = to_phi(bounds.lower(p), p, restricted);
    const Vec hi = to_phi(bounds.upper(p), p, restricted);

    BoxObjective obj;
    obj.value = [&](const Vec& phi) { return -loglik(embed * phi, reg) / nobs; };
    obj.derivatives = [&](const Vec& phi, double& f, Vec& g, Mat& h) {
        const Derivatives d = loglik_derivatives(embed * phi, reg);
        f = -d.value / nobs;
        g = -(embed.transpose() * d.grad) / nobs;
        h = -(embed.transpose() * d.hess * embed) / nobs;
    };

    std::vector<Vec> starts;
    const Vec base = data_driven_start(reg, bounds);
    starts.push_back(to_phi(base, p, restricted));
    for (const auto& extra : options.extra_starts) {
        require(extra.order() == p, "extra start has the wrong order");
        starts.push_back(to_phi(extra.flatten(), p, restricted));
    }
    for (int k = 1; k < options.n_starts; ++k) starts.push_back(to_phi(jitter(base, p, options.seed, k), p, restricted));

    std::optional<NewtonResult> best;
    int best_index = -1;
    std::vector<std::string> failures;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        NewtonResult r = projected_newton(obj, starts[k], lo, hi, options.newton);
        if (!std::isfinite(r.f) || (r.line_search_failed && r.trace.empty() && !r.converged)) {
            std::ostringstream os;
            os << "start " << k << ": line search failed at f=" << r.f << " pg=" << r.pg_norm;
            failures.push_back(os.str());
            continue;
        }
        const bool better = !best || r.f < best->f || (r.f == best->f && r.pg_norm < best->pg_norm);
        if (better) {
            best = std::move(r);
            best_index = static_cast<int>(k);
        }
    }
    if (!best) {
        std::ostringstream os;
        os << "QMLE did not converge from any start";
        for (const auto& f : failures) os << "; " << f;
        fail(ErrorKind::Convergence, os.str());
    }

    const Vec theta = embed * best->x;
    FitResult out;
    out.theta_hat = ModelParams::unflatten(theta);
    out.loglik = loglik(theta, reg);
    out.converged = best->converged;
    out.iterations = best->iterations;
    out.pg_norm = best->pg_norm;
    out.best_start = best_index;
    out.trace = std::move(best->trace);
    out.restricted = restricted;
    out.n = static_cast<int>(reg.series_length());
    out.residuals = residuals(theta, reg);

    const InfoMatrices info = info_matrices(theta, reg);
    out.sigma_hat = info.sigma;
    out.omega_hat = info.omega;
    out.xi_hat = info.xi;
    Mat cov = info.xi;
    if (restricted) {
        const Mat s_r = embed.transpose() * info.sigma * embed;
        const Mat o_r = embed.transpose() * info.omega * embed;
        const Mat s_inv = inverse_spd(s_r, "restricted information matrix");
        cov = embed * (s_inv * o_r * s_inv) * embed.transpose();
    }
    out.asd = (cov.diagonal().array().max(0.0) / static_cast<double>(out.n)).sqrt();
    return out;
}

}  // namespace

Mat restriction_embedding(int p) {
    Mat t = Mat::Zero(3 * p + 1, 2 * p + 1);
    t.topLeftCorner(p + 1, p + 1).setIdentity();
    t.block(p + 1, p + 1, p, p).setIdentity();
    t.block(2 * p + 1, p + 1, p, p).setIdentity();
    return t;
}

ResidualMoments residual_moments(const Vec& res) {
    require(res.size() > 0, "no residuals");
    const double n = static_cast<double>(res.size());
    ResidualMoments m{};
    m.kappa1 = res.array().cube().sum() / n;
    m.kappa2 = res.array().square().square().sum() / n - 1.0;
    m.tau1 = res.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }).sum() / n;
    m.tau2 = res.cwiseAbs().sum() / n;
    return m;
}

Mat inverse_spd(const Mat& m, const char* what) {
    Eigen::LDLT<Mat> ldlt(m);
    const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
    if (!(ldlt.isPositive() && rcond >= 1e-12 && (ldlt.vectorD().array() > 0.0).all())) {
        std::ostringstream os;
        os << "singular information: " << what << " is not numerically positive definite (rcond " << rcond << ")";
        fail(ErrorKind::Numeric, os.str());
    }
    Mat inv = ldlt.solve(Mat::Identity(m.rows(), m.cols()));
    return 0.5 * (inv + inv.transpose());
}

InfoMatrices info_matrices(const Vec& theta, const Regressors& reg, std::optional<std::pair<double, double>> moments) {
    const int p = reg.order();
    const int q = 2 * p + 1;
    const double n = static_cast<double>(reg.rows());
    require(reg.rows() > 3 * p + 1, "sample too small for information matrices");
    InfoMatrices out;
    out.sigma = sigma_sum(theta, reg) / n;
    if (moments) {
        const auto [k1, k2] = *moments;
        const Vec beta = theta.tail(q);
        Mat om = Mat::Zero(p + q, p + q);
        for (Eigen::Index r = 0; r < reg.rows(); ++r) {
            Vec z(p + q);
            z.head(p) = reg.y_lag.row(r).transpose();
            z.tail(q) = reg.x_lag.row(r).transpose();
            const double w = 1.0 / std::pow(reg.x_lag.row(r).dot(beta), 2);
            om.noalias() += w * z * z.transpose();
        }
        om.topRightCorner(p, q) *= k1;
        om.bottomLeftCorner(q, p) *= k1;
        om.bottomRightCorner(q, q) *= k2;
        out.omega = om / n;
    } else {
        const RowMat g = score_rows(theta, reg);
        out.omega = (g.transpose() * g) / n;
    }
    const Mat s_inv = inverse_spd(out.sigma, "Sigma");
    out.xi = s_inv * out.omega * s_inv;
    out.xi = 0.5 * (out.xi + out.xi.transpose());
    return out;
}

Vec data_driven_start(const Regressors& reg, const ParamBounds& bounds) {
    const int p = reg.order();
    Vec alpha = reg.y_lag.colPivHouseholderQr().solve(reg.y_resp);
    if (!alpha.allFinite()) alpha.setZero();
    alpha = alpha.cwiseMax(-0.95 * bounds.alpha_abs_max).cwiseMin(0.95 * bounds.alpha_abs_max);

    const Vec abs_res = (reg.y_resp - reg.y_lag * alpha).cwiseAbs();
    // E|eta| = sqrt(2/pi) under normality, so rescale to the scale of sigma_t.
    Vec beta = reg.x_lag.colPivHouseholderQr().solve(abs_res) * std::sqrt(std::numbers::pi / 2.0);
    if (!beta.allFinite()) beta = Vec::Zero(2 * p + 1);
    const double floor_omega = std::max(bounds.omega_lo, 0.1 * abs_res.mean());
    beta(0) = std::clamp(std::max(beta(0), floor_omega), bounds.omega_lo, bounds.omega_hi);
    for (Eigen::Index j = 1; j < beta.size(); ++j) beta(j) = std::clamp(beta(j), bounds.beta_lo, bounds.beta_hi);

    Vec theta(3 * p + 1);
    theta.head(p) = alpha;
    theta.tail(2 * p + 1) = beta;
    return theta;
}

FitResult fit_qmle(const Regressors& reg, const ParamBounds& bounds, const FitOptions& options) {
    return fit_impl(reg, bounds, options, false);
}

FitResult fit_qmle(const SeriesSample& series, int p, const ParamBounds& bounds, const FitOptions& options) {
    series.validate(p);
    return fit_qmle(build_regressors(series, p), bounds, options);
}

FitResult fit_restricted(const Regressors& reg, const ParamBounds& bounds, const FitOptions& options) {
    return fit_impl(reg, bounds, options, true);
}

FitResult fit_restricted(const SeriesSample& series, int p, const ParamBounds& bounds, const FitOptions& options) {
    series.validate(p);
    return fit_restricted(build_regressors(series, p), bounds, options);
}

}  // namespace aldar
