#include <doctest.h>

#include <complex>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "aldar/asymtest.hpp"
#include "aldar/error.hpp"
#include "aldar/stats.hpp"

using namespace aldar;

namespace {

// Imhof (1961) inversion for P(sum_j e_j chi2_1 > q).
double imhof_tail(const std::vector<double>& e, double q) {
    auto integrand = [&](double u) {
        if (u == 0.0) {
            double s = 0.0;
            for (double l : e) s += l;
            return 0.5 * (s - q);
        }
        double theta = -0.5 * q * u, rho = 1.0;
        for (double l : e) {
            theta += 0.5 * std::atan(l * u);
            rho *= std::pow(1.0 + l * l * u * u, 0.25);
        }
        return std::sin(theta) / (u * rho);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0;
    for (double a = 0.0; a < 2000.0; a += 10.0) total += ts.integrate(integrand, a, a + 10.0);
    return 0.5 + total / std::numbers::pi;
}

FitResult synthetic_fit(const Vec& theta, const Mat& xi, int n) {
    FitResult f;
    f.theta_hat = ModelParams::unflatten(theta);
    f.xi_hat = xi;
    f.sigma_hat = Mat::Identity(theta.size(), theta.size());
    f.n = n;
    f.converged = true;
    return f;
}

}  // namespace

TEST_SUITE("asymtest") {
    TEST_CASE("restriction matrix") {
        const Mat r = restriction_matrix(2);
        REQUIRE(r.rows() == 2);
        REQUIRE(r.cols() == 7);
        Vec theta(7);
        theta << 0.1, 0.2, 0.3, 0.5, 0.6, 0.4, 0.9;
        const Vec d = r * theta;
        CHECK(d(0) == doctest::Approx(0.1));
        CHECK(d(1) == doctest::Approx(-0.3));
    }

    TEST_CASE("Wald statistic on a hand-built fit") {
        Vec theta(4);
        theta << 0.4, 0.5, 0.6, 0.5;
        Mat xi = Mat::Identity(4, 4);
        const TestResult w = wald_test(synthetic_fit(theta, xi, 100));
        CHECK(w.statistic == doctest::Approx(100 * 0.01 / 2.0));
        CHECK(w.p_value == doctest::Approx(chi2_sf(0.5, 1)));
    }

    TEST_CASE("Pearson approximation is exact for equal weights") {
        for (int p = 1; p <= 5; ++p)
            for (double q : {0.3, 2.0, 7.5, 15.0}) {
                const double approx = pearson_pvalue(Vec::Ones(p), q);
                CHECK(std::abs(approx - chi2_sf(q, p)) < 1e-14);
            }
    }

    TEST_CASE("Pearson approximation tracks the Imhof inversion") {
        for (const std::vector<double>& e : {std::vector<double>{2.0, 1.0}, std::vector<double>{3.0, 1.0, 0.5}}) {
            Vec v = Eigen::Map<const Vec>(e.data(), static_cast<Eigen::Index>(e.size()));
            for (double q : {3.0, 6.0, 10.0, 16.0}) {
                CAPTURE(q);
                // Three-moment matching is an approximation; its error peaks near the center.
                CHECK(std::abs(pearson_pvalue(v, q) - imhof_tail(e, q)) < 0.03);
                if (q >= 10.0) CHECK(std::abs(pearson_pvalue(v, q) - imhof_tail(e, q)) < 0.005);
            }
        }
        Vec e(2);
        e << 2.0, 1.0;
        double prev = 1.0;
        for (double q = 0.0; q < 30.0; q += 0.5) {
            const double pv = pearson_pvalue(e, q);
            CHECK(pv <= prev + 1e-15);
            prev = pv;
        }
        CHECK_THROWS_AS(pearson_pvalue(Vec::Zero(2), 1.0), Error);
    }

    TEST_CASE("QLR sign handling") {
        Vec theta(4);
        theta << 0.4, 0.5, 0.5, 0.5;
        FitResult r = synthetic_fit(theta, Mat::Identity(4, 4), 1000);
        FitResult u = r;
        r.restricted = true;
        r.loglik = -500.0;
        u.loglik = -500.0 - 1e-9;  // inside the tolerance
        CHECK(qlr_test(r, u).statistic == 0.0);
        u.loglik = -499.0;
        CHECK(qlr_test(r, u).statistic == doctest::Approx(2.0));
        u.loglik = -501.0;
        CHECK_THROWS_AS(qlr_test(r, u), Error);
    }

    TEST_CASE("tests on simulated symmetric and asymmetric data") {
        const auto innov = make_innovation(Normal{});
        const ModelParams sym(Vec::Constant(1, 0.4), 0.4, Vec::Constant(1, 0.5), Vec::Constant(1, 0.5));
        const ModelParams asym(Vec::Constant(1, 0.4), 0.4, Vec::Constant(1, 0.2), Vec::Constant(1, 0.8));
        for (int k = 0; k < 2; ++k) {
            const auto y = simulate(k == 0 ? sym : asym, innov, 2000, 500, 77);
            const Regressors reg = build_regressors(y, 1);
            const AsymmetryFits fits = fit_both(reg);
            CHECK(fits.unrestricted.loglik >= fits.restricted.loglik);
            const AsymmetryTestReport rep = asymmetry_tests(fits, reg);
            for (double pv : {rep.wald.p_value, rep.lm.p_value, rep.qlr.p_value}) {
                CHECK(pv >= 0.0);
                CHECK(pv <= 1.0);
                if (k == 1) CHECK(pv < 1e-3);
            }
            CHECK(rep.qlr.eigenvalues.size() == 1);
            CHECK(rep.psi.rows() == 1);
            // For p = 1 the weight is a scalar and the p-value is a scaled chi2_1 tail.
            CHECK(rep.qlr.p_value == doctest::Approx(chi2_sf(rep.qlr.statistic / rep.qlr.eigenvalues(0), 1)).epsilon(1e-9));
        }
    }

    TEST_CASE("local alternatives") {
        Vec theta(4);
        theta << 0.4, 0.4, 0.5, 0.5;
        const ModelParams t0 = ModelParams::unflatten(theta);
        Vec h = Vec::Zero(4);
        h(3) = 2.0;
        const ModelParams t1 = local_alternative_dgp(t0, h, 400, {});
        CHECK(t1.beta_minus(0) == doctest::Approx(0.6));
        h(3) = -20.0;
        CHECK_THROWS_AS(local_alternative_dgp(t0, h, 400, {}), Error);
    }
}
