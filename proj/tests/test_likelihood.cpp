#include <doctest.h>

#include <omp.h>

#include "aldar/error.hpp"
#include "aldar/likelihood.hpp"
#include "support.hpp"

using namespace aldar;

namespace {

ModelParams table1_truth() {
    return ModelParams(Vec::Constant(1, 0.5), 0.4, Vec::Constant(1, 0.4), Vec::Constant(1, 0.6));
}

ModelParams order_two() {
    Vec a(2), bp(2), bm(2);
    a << 0.3, -0.2;
    bp << 0.2, 0.2;
    bm << 0.2, 0.1;
    return ModelParams(a, 0.4, bp, bm);
}

}  // namespace

TEST_SUITE("likelihood") {
    TEST_CASE("regressor layout") {
        const std::vector<double> y{1.0, -2.0, 3.0, -4.0};
        const Regressors reg = build_regressors(y, 2);
        REQUIRE(reg.rows() == 2);
        CHECK(reg.series_length() == 4);
        // Row 0 is t = 3 (1-based) with lags y_2 = -2, y_1 = 1.
        CHECK(reg.y_resp(0) == 3.0);
        CHECK(reg.y_lag(0, 0) == -2.0);
        CHECK(reg.y_lag(0, 1) == 1.0);
        CHECK(reg.x_lag(0, 0) == 1.0);
        CHECK(reg.x_lag(0, 1) == 0.0);
        CHECK(reg.x_lag(0, 2) == 1.0);
        CHECK(reg.x_lag(0, 3) == 2.0);
        CHECK(reg.x_lag(0, 4) == 0.0);
        CHECK_THROWS_AS(build_regressors(y, 4), Error);
    }

    TEST_CASE("log-likelihood equals the plain loop") {
        const auto innov = make_innovation(StandardizedT{5.0});
        for (const ModelParams& m : {table1_truth(), order_two()}) {
            const auto y = simulate(m, innov, 3000, 300, 21).values;
            const Regressors reg = build_regressors(y, m.order());
            CHECK(loglik(m.flatten(), reg) == doctest::Approx(testing::naive_loglik(m, y)).epsilon(1e-12));
        }
    }

    TEST_CASE("chunked kernels agree with the serial reference") {
        const ModelParams m = order_two();
        const auto y = simulate(m, make_innovation(Normal{}), 5000, 300, 3).values;
        const Regressors reg = build_regressors(y, 2);
        Vec theta = m.flatten();
        theta(0) += 0.05;
        theta(4) *= 1.3;
        CHECK(loglik(theta, reg) == doctest::Approx(serial::loglik(theta, reg)).epsilon(1e-12));
        CHECK(testing::rel_err(score(theta, reg), serial::score(theta, reg)) < 1e-11);
        CHECK(testing::rel_err(hessian(theta, reg), serial::hessian(theta, reg)) < 1e-11);
        CHECK(testing::rel_err(sigma_sum(theta, reg), serial::sigma_sum(theta, reg)) < 1e-11);
        const Derivatives d = loglik_derivatives(theta, reg);
        CHECK(d.value == loglik(theta, reg));
        CHECK(d.grad == score(theta, reg));
        CHECK(d.hess == hessian(theta, reg));
        CHECK(d.hess.isApprox(d.hess.transpose(), 0.0));
    }

    TEST_CASE("results do not depend on the thread count") {
        const ModelParams m = order_two();
        const auto y = simulate(m, make_innovation(Normal{}), 20000, 300, 4).values;
        const Regressors reg = build_regressors(y, 2);
        const Vec theta = m.flatten();
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const Derivatives one = loglik_derivatives(theta, reg);
        const Mat s1 = sigma_sum(theta, reg);
        omp_set_num_threads(4);
        const Derivatives four = loglik_derivatives(theta, reg);
        const Mat s4 = sigma_sum(theta, reg);
        omp_set_num_threads(saved);
        CHECK(one.value == four.value);
        CHECK(one.grad == four.grad);
        CHECK(one.hess == four.hess);
        CHECK(s1 == s4);
    }

    TEST_CASE("score and Hessian match central differences") {
        const ModelParams m = order_two();
        const auto y = simulate(m, make_innovation(StandardizedSkewedT{5.0, -1.2}), 800, 300, 8).values;
        const Regressors reg = build_regressors(y, 2);
        const Vec theta = m.flatten() * 1.1;
        const Vec g = score(theta, reg);
        const Vec g_fd = testing::central_gradient([&](const Vec& x) { return loglik(x, reg); }, theta, 1e-5);
        CHECK(testing::rel_err(g, g_fd) < 1e-6);
        const Mat h = hessian(theta, reg);
        const Mat h_fd = testing::central_jacobian([&](const Vec& x) { return score(x, reg); }, theta, 1e-5);
        CHECK(testing::rel_err(h, h_fd) < 1e-6);
    }

    TEST_CASE("per-row scores and residuals") {
        const ModelParams m = table1_truth();
        const auto y = simulate(m, make_innovation(Normal{}), 1500, 300, 5).values;
        const Regressors reg = build_regressors(y, 1);
        const Vec theta = m.flatten();
        const RowMat rows = score_rows(theta, reg);
        REQUIRE(rows.rows() == reg.rows());
        CHECK(testing::rel_err(rows.colwise().sum().transpose(), score(theta, reg)) < 1e-12);
        const Vec eta = residuals(theta, reg);
        for (Eigen::Index r = 0; r < 5; ++r) {
            const double yl = y[r];
            const double s = 0.4 + 0.4 * std::max(yl, 0.0) - 0.6 * std::min(yl, 0.0);
            CHECK(eta(r) == doctest::Approx((y[r + 1] - 0.5 * yl) / s).epsilon(1e-13));
        }
    }
}
