#include <doctest.h>

#include <numbers>

#include "aldar/error.hpp"
#include "aldar/selection.hpp"

using namespace aldar;

TEST_SUITE("selection") {
    TEST_CASE("criteria formulas") {
        CHECK(bic1(-100.0, 201, 1) == doctest::Approx(200.0 + 4.0 * std::log(200.0)));
        Mat s = Mat::Identity(4, 4);
        s(0, 0) = 2.0;
        s(3, 3) = 5.0;
        CHECK(logdet_spd(s) == doctest::Approx(std::log(10.0)));
        CHECK(bic2(-100.0, 201, 1, s) ==
              doctest::Approx(200.0 + 4.0 * std::log(200.0 / (2.0 * std::numbers::pi)) + std::log(10.0)));
        Mat a(3, 3);
        a << 4, 2, 0.6, 2, 3, 0.4, 0.6, 0.4, 1;
        const Eigen::SelfAdjointEigenSolver<Mat> es(a);
        CHECK(logdet_spd(a) == doctest::Approx(es.eigenvalues().array().log().sum()).epsilon(1e-12));
        CHECK_THROWS_AS(logdet_spd(-a), Error);
    }

    TEST_CASE("BIC2 picks the true order on a long order-two series") {
        Vec a(2), bp(2), bm(2);
        a << 0.3, -0.2;
        bp << 0.2, 0.2;
        bm << 0.2, 0.1;
        const auto y = simulate(ModelParams(a, 0.4, bp, bm), make_innovation(Normal{}), 2000, 500, 41);
        const SelectionReport rep = select_order(y, 4);
        REQUIRE(rep.table.size() == 4);
        for (int p = 1; p <= 4; ++p) {
            const auto& row = rep.table[p - 1];
            CHECK(row.p == p);
            CHECK(row.ok);
            CHECK(row.bic1 == doctest::Approx(-2.0 * row.loglik + (3 * p + 1) * std::log(2000.0 - p)));
        }
        CHECK(rep.p_hat_bic2 == 2);
        CHECK(rep.p_hat_bic1 == 2);
    }

    TEST_CASE("selection needs a valid p_max") {
        SeriesSample y{std::vector<double>(50, 0.1), "flat"};
        CHECK_THROWS_AS(select_order(y, 0), Error);
    }
}
