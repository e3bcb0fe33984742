#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "aldar/error.hpp"
#include "aldar/innovation.hpp"

using namespace aldar;

namespace {

struct SampleMoments {
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0, sgn = 0, abs = 0;
};

SampleMoments sample_moments(const InnovationSpec& s, int n, std::uint64_t seed) {
    Rng rng(seed);
    SampleMoments m;
    for (int i = 0; i < n; ++i) {
        const double x = s.draw(rng);
        m.m1 += x;
        m.m2 += x * x;
        m.m3 += x * x * x;
        m.m4 += x * x * x * x;
        m.sgn += (x > 0) - (x < 0);
        m.abs += std::abs(x);
    }
    for (double* v : {&m.m1, &m.m2, &m.m3, &m.m4, &m.sgn, &m.abs}) *v /= n;
    return m;
}

}  // namespace

TEST_SUITE("innovation") {
    TEST_CASE("normal moments are the textbook values") {
        const auto s = make_innovation(Normal{});
        CHECK(s.kappa1 == 0.0);
        CHECK(s.kappa2 == doctest::Approx(2.0));
        CHECK(s.tau2 == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
        CHECK(s.sigma_xi_sq == doctest::Approx(1.0 - 2.0 / std::numbers::pi));
        CHECK(s.abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.abs_moment(4.0) == doctest::Approx(3.0).epsilon(1e-12));
    }

    TEST_CASE("standardized t moments match quadrature of the density") {
        const double df = 5.0;
        const auto s = make_innovation(StandardizedT{df});
        CHECK(s.kappa2 == doctest::Approx(8.0).epsilon(1e-12));  // 3(v-2)/(v-4) - 1
        const double c = std::sqrt(df / (df - 2.0));
        boost::math::students_t_distribution<double> t(df);
        boost::math::quadrature::exp_sinh<double> half_line;
        for (double k : {0.1, 0.6, 1.0, 2.0}) {
            const double oracle = 2.0 * half_line.integrate([&](double x) { return std::pow(x, k) * c * pdf(t, c * x); });
            CHECK(s.abs_moment(k) == doctest::Approx(oracle).epsilon(1e-8));
        }
        CHECK(s.tau2 == doctest::Approx(s.abs_moment(1.0)).epsilon(1e-12));
    }

    TEST_CASE("laplace has unit variance and E|eta| = 1/sqrt(2)") {
        const auto s = make_innovation(Laplace{});
        CHECK(s.abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.tau2 == doctest::Approx(1.0 / std::numbers::sqrt2));
        const auto m = sample_moments(s, 200000, 7);
        CHECK(m.m2 == doctest::Approx(1.0).epsilon(0.02));
    }

    TEST_CASE("skewed t is standardized and left-skewed for negative skew") {
        const auto s = make_innovation(StandardizedSkewedT{5.0, -1.2});
        const double zero[] = {0.0};
        CHECK(std::abs(s.expect([](double x) { return x; }, zero)) < 1e-8);
        CHECK(s.expect([](double x) { return x * x; }, zero) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(s.expect([](double) { return 1.0; }, zero) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(s.kappa1 < 0.0);
        CHECK(s.expect([](double x) { return x * x * x; }, zero) == doctest::Approx(s.kappa1).epsilon(1e-6));
        CHECK(s.tau1 > 0.0);  // the mass sits right of zero, with a long left tail
    }

    TEST_CASE("draws reproduce the moment functionals") {
        for (const InnovationKind& k :
             {InnovationKind{Normal{}}, InnovationKind{StandardizedT{5.0}}, InnovationKind{StandardizedSkewedT{5.0, -1.2}}}) {
            const auto s = make_innovation(k);
            CAPTURE(s.name());
            const int n = 400000;
            const auto m = sample_moments(s, n, 11);
            CHECK(std::abs(m.m1) < 5.0 / std::sqrt(n));
            CHECK(m.m2 == doctest::Approx(1.0).epsilon(0.02));
            CHECK(m.sgn == doctest::Approx(s.tau1).epsilon(0.01).scale(1.0));
            CHECK(m.abs == doctest::Approx(s.tau2).epsilon(0.01));
        }
    }

    TEST_CASE("pdf integrates to one") {
        for (const InnovationKind& k : {InnovationKind{Normal{}}, InnovationKind{StandardizedT{6.5}},
                                        InnovationKind{StandardizedSkewedT{7.0, 0.8}}, InnovationKind{Laplace{}}}) {
            const auto s = make_innovation(k);
            CHECK(s.expect([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    TEST_CASE("df at or below four is a fourth-moment violation") {
        CHECK_THROWS_WITH_AS(make_innovation(StandardizedT{4.0}), doctest::Contains("fourth-moment"), Error);
        CHECK_THROWS_AS(make_innovation(StandardizedSkewedT{3.0, 0.0}), Error);
    }

    TEST_CASE("parse_innovation") {
        CHECK(std::holds_alternative<Normal>(parse_innovation("normal")));
        CHECK(std::get<StandardizedT>(parse_innovation("t5")).df == 5.0);
        CHECK(std::get<StandardizedT>(parse_innovation("t:7.5")).df == 7.5);
        const auto st = std::get<StandardizedSkewedT>(parse_innovation("st"));
        CHECK(st.df == 5.0);
        CHECK(st.skew == -1.2);
        CHECK(std::get<StandardizedSkewedT>(parse_innovation("st:6:0.5")).skew == 0.5);
        CHECK(std::holds_alternative<Laplace>(parse_innovation("laplace")));
        CHECK_THROWS_AS(parse_innovation("cauchy"), Error);
        CHECK_THROWS_AS(parse_innovation("t:abc"), Error);
    }
}
