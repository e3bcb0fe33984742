#include <doctest.h>

#include "aldar/error.hpp"
#include "aldar/estimation.hpp"
#include "support.hpp"

using namespace aldar;

namespace {

ModelParams table1_truth() {
    return ModelParams(Vec::Constant(1, 0.5), 0.4, Vec::Constant(1, 0.4), Vec::Constant(1, 0.6));
}

}  // namespace

TEST_SUITE("estimation") {
    TEST_CASE("QMLE recovers the parameters within a few standard errors") {
        const ModelParams truth = table1_truth();
        const auto y = simulate(truth, make_innovation(Normal{}), 2000, 500, 101);
        const FitResult fit = fit_qmle(y, 1);
        REQUIRE(fit.converged);
        CHECK(fit.pg_norm <= 1e-7);
        CHECK(fit.n == 2000);
        CHECK(fit.residuals.size() == 1999);
        const Vec z = (fit.theta_hat.flatten() - truth.flatten()).cwiseQuotient(fit.asd);
        CHECK(z.cwiseAbs().maxCoeff() < 4.0);
        // The estimate is a stationary point of the likelihood.
        const Regressors reg = build_regressors(y, 1);
        CHECK(score(fit.theta_hat.flatten(), reg).norm() / reg.rows() < 1e-6);
        CHECK(fit.loglik == doctest::Approx(testing::naive_loglik(fit.theta_hat, y.values)).epsilon(1e-12));
    }

    TEST_CASE("ASD is the sandwich diagonal over n") {
        const auto y = simulate(table1_truth(), make_innovation(StandardizedT{5.0}), 1500, 500, 7);
        const FitResult fit = fit_qmle(y, 1);
        const Regressors reg = build_regressors(y, 1);
        const Vec theta = fit.theta_hat.flatten();
        const RowMat g = score_rows(theta, reg);
        const Mat omega = g.transpose() * g / static_cast<double>(reg.rows());
        const Mat sigma = serial::sigma_sum(theta, reg) / static_cast<double>(reg.rows());
        const Mat si = sigma.inverse();
        const Mat xi = si * omega * si;
        CHECK(testing::rel_err(fit.xi_hat, xi) < 1e-9);
        for (int j = 0; j < 4; ++j) CHECK(fit.asd(j) == doctest::Approx(std::sqrt(xi(j, j) / 1500.0)).epsilon(1e-9));
        CHECK(fit.sigma_hat.isApprox(fit.sigma_hat.transpose()));
        CHECK(Eigen::SelfAdjointEigenSolver<Mat>(fit.sigma_hat).eigenvalues().minCoeff() > 0.0);
    }

    TEST_CASE("moment-based Omega agrees with the outer product at the truth") {
        const ModelParams truth = table1_truth();
        // df = 9 keeps the eighth moment finite, so the outer product settles quickly.
        const auto innov = make_innovation(StandardizedSkewedT{9.0, -1.2});
        const auto y = simulate(truth, innov, 200000, 500, 13);
        const Regressors reg = build_regressors(y, 1);
        const InfoMatrices op = info_matrices(truth.flatten(), reg);
        const InfoMatrices mo = info_matrices(truth.flatten(), reg, std::pair{innov.kappa1, innov.kappa2});
        CHECK(testing::rel_err(op.sigma, mo.sigma) == 0.0);
        CHECK(testing::rel_err(op.omega, mo.omega) < 0.1);
    }

    TEST_CASE("restricted fit imposes beta+ = beta- and never beats the full fit") {
        const auto y = simulate(table1_truth(), make_innovation(Normal{}), 1000, 500, 17);
        const Regressors reg = build_regressors(y, 1);
        const FitResult r = fit_restricted(reg);
        const FitResult u = fit_qmle(reg);
        CHECK(r.restricted);
        CHECK(r.theta_hat.beta_plus(0) == r.theta_hat.beta_minus(0));
        CHECK(r.loglik <= u.loglik + 1e-9);
        CHECK(r.asd(2) == doctest::Approx(r.asd(3)));
        const Mat t = restriction_embedding(1);
        CHECK(t.rows() == 4);
        CHECK(t.cols() == 3);
        CHECK(t(3, 2) == 1.0);
    }

    TEST_CASE("scale equivariance") {
        const auto y = simulate(table1_truth(), make_innovation(Normal{}), 1000, 500, 23);
        const double c = 3.5;
        SeriesSample yc = y;
        for (double& v : yc.values) v *= c;
        const FitResult a = fit_qmle(y, 1);
        const FitResult b = fit_qmle(yc, 1, ParamBounds{}.scaled(c));
        CHECK(b.theta_hat.alpha(0) == doctest::Approx(a.theta_hat.alpha(0)).epsilon(1e-6));
        CHECK(b.theta_hat.omega == doctest::Approx(c * a.theta_hat.omega).epsilon(1e-6));
        CHECK(b.theta_hat.beta_plus(0) == doctest::Approx(a.theta_hat.beta_plus(0)).epsilon(1e-6));
        CHECK(b.theta_hat.beta_minus(0) == doctest::Approx(a.theta_hat.beta_minus(0)).epsilon(1e-6));
        CHECK(b.loglik == doctest::Approx(a.loglik - 999 * std::log(c)).epsilon(1e-9));
    }

    TEST_CASE("fits are deterministic and the start order is stable") {
        const auto y = simulate(table1_truth(), make_innovation(Normal{}), 600, 500, 29);
        FitOptions o;
        o.n_starts = 4;
        const FitResult a = fit_qmle(y, 1, {}, o);
        const FitResult b = fit_qmle(y, 1, {}, o);
        CHECK(a.theta_hat.flatten() == b.theta_hat.flatten());
        CHECK(a.best_start == b.best_start);
        CHECK(a.trace.size() == b.trace.size());
    }

    TEST_CASE("data-driven start lies in the box") {
        const auto y = simulate(table1_truth(), make_innovation(Normal{}), 400, 500, 31);
        const Regressors reg = build_regressors(y, 2);
        const ParamBounds b;
        const Vec s = data_driven_start(reg, b);
        CHECK((s.array() >= b.lower(2).array()).all());
        CHECK((s.array() <= b.upper(2).array()).all());
    }

    TEST_CASE("too short a series is a usage error") {
        SeriesSample y{{0.1, -0.2, 0.3, 0.1, 0.2}, "tiny"};
        try {
            fit_qmle(y, 2);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Usage);
        }
    }

    TEST_CASE("singular matrices are reported") {
        Mat m = Mat::Ones(3, 3);
        CHECK_THROWS_WITH_AS(inverse_spd(m, "test"), doctest::Contains("singular"), Error);
        Mat good = Mat::Identity(3, 3) * 2.0;
        CHECK(inverse_spd(good, "test").isApprox(Mat::Identity(3, 3) * 0.5));
    }

    TEST_CASE("residual moments") {
        Vec r(4);
        r << -2.0, -1.0, 1.0, 2.0;
        const ResidualMoments m = residual_moments(r);
        CHECK(m.kappa1 == 0.0);
        CHECK(m.kappa2 == doctest::Approx((16 + 1 + 1 + 16) / 4.0 - 1.0));
        CHECK(m.tau1 == 0.0);
        CHECK(m.tau2 == 1.5);
    }
}
