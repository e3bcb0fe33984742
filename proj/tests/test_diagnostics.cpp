#include <doctest.h>

#include "aldar/diagnostics.hpp"
#include "aldar/error.hpp"
#include "aldar/stats.hpp"

using namespace aldar;

namespace {

// The ACF display written out with explicit sums.
double naive_acf(const std::vector<double>& x, int k) {
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        den += (x[t] - m) * (x[t] - m);
        if (t >= static_cast<std::size_t>(k)) num += (x[t] - m) * (x[t - k] - m);
    }
    return num / den;
}

ModelParams table4_truth(double c1, double c2) {
    Vec a(2), bp(2), bm(2);
    a << 0.3, c1;
    bp << 0.3, c2;
    bm << 0.4, c2;
    return ModelParams(a, 0.4, bp, bm);
}

}  // namespace

TEST_SUITE("diagnostics") {
    TEST_CASE("ACFs follow the sample formula") {
        Rng rng(3);
        std::normal_distribution<double> z;
        std::vector<double> x(500);
        for (double& v : x) v = z(rng) + 0.3;
        const Vec xv = Eigen::Map<Vec>(x.data(), 500);
        const ResidualAcfs a = residual_acfs(xv, 5);
        std::vector<double> ax(500);
        for (int i = 0; i < 500; ++i) ax[i] = std::abs(x[i]);
        for (int k = 1; k <= 5; ++k) {
            CHECK(a.rho(k - 1) == doctest::Approx(naive_acf(x, k)).epsilon(1e-12));
            CHECK(a.gamma(k - 1) == doctest::Approx(naive_acf(ax, k)).epsilon(1e-12));
            CHECK(std::abs(a.rho(k - 1)) <= 1.0);
        }
        const ResidualAcfs neg = residual_acfs(-xv, 5);
        CHECK((neg.rho - a.rho).norm() < 1e-14);
        CHECK((neg.gamma - a.gamma).norm() < 1e-14);
    }

    TEST_CASE("alternating residuals break the absolute-residual branch") {
        Vec x(100);
        for (int i = 0; i < 100; ++i) x(i) = i % 2 ? -1.0 : 1.0;
        CHECK_THROWS_WITH_AS(residual_acfs(x, 3), doctest::Contains("degenerate"), Error);
        CHECK_THROWS_AS(residual_acfs(Vec::Constant(50, 2.0), 3), Error);
        CHECK_THROWS_AS(residual_acfs(Vec::Ones(4), 3), Error);
    }

    TEST_CASE("white noise ACFs are small") {
        Rng rng(8);
        std::normal_distribution<double> z;
        Vec x(10000);
        for (auto& v : x) v = z(rng);
        const ResidualAcfs a = residual_acfs(x, 6);
        CHECK(a.rho.cwiseAbs().maxCoeff() <= 4.0 / 100.0);
        CHECK(a.gamma.cwiseAbs().maxCoeff() <= 4.0 / 100.0);
    }

    TEST_CASE("portmanteau report is internally consistent") {
        const auto y = simulate(table4_truth(0.0, 0.0), make_innovation(Normal{}), 2000, 500, 12);
        const Regressors reg = build_regressors(y, 1);
        const FitResult fit = fit_qmle(reg);
        const Mat c = acf_covariance(fit, reg, 6);
        REQUIRE(c.rows() == 12);
        CHECK((c - c.transpose()).norm() < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Mat>(c).eigenvalues().minCoeff() > -1e-8);
        const AcfReport rep = portmanteau(fit, reg, 6);
        CHECK(rep.df == 12);
        CHECK(rep.q_stat >= 0.0);
        CHECK(rep.p_value == doctest::Approx(chi2_sf(rep.q_stat, 12)));
        CHECK(rep.band_rho(0) == doctest::Approx(1.96 * std::sqrt(c(0, 0) / 2000.0)));
        // Bands are near the white-noise 1.96/sqrt(n) scale under correct specification.
        CHECK(rep.band_rho.maxCoeff() < 2.0 * 1.96 / std::sqrt(2000.0));
    }

    TEST_CASE("estimated ACF covariance matches the Monte Carlo spread") {
        // The estimation effect through U moves var(sqrt(n) gamma_1) well
        // away from 1 for this design, so the comparison has bite.
        const ModelParams truth(Vec::Constant(1, 0.5), 0.4, Vec::Constant(1, 0.4), Vec::Constant(1, 0.6));
        const auto innov = make_innovation(Normal{});
        constexpr int kReps = 400;
        constexpr int kN = 1000;
        FitOptions opts;
        opts.n_starts = 1;
        std::vector<double> rho, gam;
        double pred_rho = 0.0, pred_gam = 0.0;
        for (int r = 0; r < kReps; ++r) {
            const auto y = simulate(truth, innov, kN, 500, 1000 + r);
            const Regressors reg = build_regressors(y, 1);
            const FitResult fit = fit_qmle(reg, {}, opts);
            const ResidualAcfs a = residual_acfs(fit.residuals, 1);
            const Mat c = acf_covariance(fit, reg, 1);
            rho.push_back(a.rho(0));
            gam.push_back(a.gamma(0));
            pred_rho += c(0, 0) / kReps;
            pred_gam += c(1, 1) / kReps;
        }
        auto scaled_var = [](const std::vector<double>& v) {
            double m = 0.0, s = 0.0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            for (double x : v) s += (x - m) * (x - m);
            return kN * s / static_cast<double>(v.size() - 1);
        };
        CHECK(scaled_var(rho) == doctest::Approx(pred_rho).epsilon(0.2));
        CHECK(scaled_var(gam) == doctest::Approx(pred_gam).epsilon(0.2));
        CHECK(std::abs(pred_gam - 1.0) > 0.2);
    }

    TEST_CASE("Q(M) is scale invariant") {
        const auto y = simulate(table4_truth(0.0, 0.0), make_innovation(StandardizedT{5.0}), 1500, 500, 19);
        SeriesSample yc = y;
        for (double& v : yc.values) v *= 4.0;
        const Regressors r1 = build_regressors(y, 1), r2 = build_regressors(yc, 1);
        const AcfReport a = portmanteau(fit_qmle(r1), r1, 6);
        const AcfReport b = portmanteau(fit_qmle(r2, ParamBounds{}.scaled(4.0)), r2, 6);
        CHECK(b.q_stat == doctest::Approx(a.q_stat).epsilon(1e-6));
    }

    TEST_CASE("mean misspecification is detected") {
        const auto y = simulate(table4_truth(0.3, 0.0), make_innovation(Normal{}), 1000, 500, 5);
        const Regressors reg = build_regressors(y, 1);
        CHECK(portmanteau(fit_qmle(reg), reg, 6).p_value < 0.05);
    }

    TEST_CASE("preconditions") {
        const auto y = simulate(table4_truth(0.0, 0.0), make_innovation(Normal{}), 300, 500, 1);
        const Regressors reg = build_regressors(y, 1);
        FitResult fit = fit_qmle(reg);
        CHECK_THROWS_AS(portmanteau(fit, reg, 0), Error);
        CHECK_THROWS_AS(portmanteau(fit, reg, 200), Error);
        fit.converged = false;
        CHECK_THROWS_AS(portmanteau(fit, reg, 6), Error);
    }
}
