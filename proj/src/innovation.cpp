#include "aldar/innovation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "aldar/error.hpp"

namespace aldar {
namespace {


template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// E|T|^r for an unstandardized Student t with `df` degrees of freedom, r < df.
double t_abs_moment(double df, double r) {
    using boost::math::lgamma;
    return std::exp(0.5 * r * std::log(df) + lgamma(0.5 * (r + 1.0)) + lgamma(0.5 * (df - r)) -
                    0.5 * std::log(std::numbers::pi) - lgamma(0.5 * df));
}

double t_pdf(double df, double x) { return boost::math::pdf(boost::math::students_t_distribution<double>(df), x); }

double t_cdf(double df, double x) { return boost::math::cdf(boost::math::students_t_distribution<double>(df), x); }

void check_df(double df) {
    if (!(df > 4.0)) {
        std::ostringstream os;
        os << "fourth-moment violation: innovation df must exceed 4 (got " << df << ")";
        fail(ErrorKind::Usage, os.str());
    }
}

}  // namespace

InnovationSpec make_innovation(const InnovationKind& kind) {
    InnovationSpec spec;
    spec.kind_ = kind;
    std::visit(overloaded{
                   [&](const Normal&) {
                       spec.kappa1 = 0.0;
                       spec.kappa2 = 2.0;
                       spec.tau1 = 0.0;
                       spec.tau2 = std::sqrt(2.0 / std::numbers::pi);
                   },
                   [&](const StandardizedT& t) {
                       check_df(t.df);
                       const double v = t.df;
                       spec.kappa1 = 0.0;
                       spec.kappa2 = 3.0 * (v - 2.0) / (v - 4.0) - 1.0;
                       spec.tau1 = 0.0;
                       spec.tau2 = t_abs_moment(v, 1.0) * std::sqrt((v - 2.0) / v);
                   },
                   [&](const StandardizedSkewedT& st) {
                       check_df(st.df);
                       const double v = st.df;
                       const double g = std::exp(kSkewScale * st.skew);
                       auto raw = [&](int r) {
                           const double sign = (r % 2 == 0) ? 1.0 : -1.0;
                           return t_abs_moment(v, r) * (std::pow(g, r + 1) + sign * std::pow(g, -(r + 1))) /
                                  (g + 1.0 / g);
                       };
                       const double m1 = raw(1), m2 = raw(2), m3 = raw(3), m4 = raw(4);
                       const double var = m2 - m1 * m1;
                       const double s = std::sqrt(var);
                       spec.gamma_ = g;
                       spec.loc_ = m1;
                       spec.scale_ = s;
                       spec.kappa1 = (m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1) / (var * s);
                       spec.kappa2 =
                           (m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1) / (var * var) - 1.0;
                       const double pneg = 1.0 / (1.0 + g * g);
                       double below;  // P(x < loc)
                       if (m1 <= 0.0) {
                           below = 2.0 * pneg * (1.0 - t_cdf(v, -m1 * g));
                       } else {
                           below = pneg + (1.0 - pneg) * (2.0 * t_cdf(v, m1 / g) - 1.0);
                       }
                       spec.tau1 = 1.0 - 2.0 * below;
                       const double zero[] = {0.0};
                       spec.tau2 = spec.expect([](double x) { return std::abs(x); }, zero, 1e-10);
                       const double mean = spec.expect([](double x) { return x; }, zero, 1e-10);
                       const double second = spec.expect([](double x) { return x * x; }, zero, 1e-8);
                       if (std::abs(mean) > 1e-6 || std::abs(second - 1.0) > 1e-6)
                           fail(ErrorKind::Numeric, "skewed-t standardization did not converge");
                   },
                   [&](const Laplace&) {
                       spec.kappa1 = 0.0;
                       spec.kappa2 = 5.0;
                       spec.tau1 = 0.0;
                       spec.tau2 = 1.0 / std::numbers::sqrt2;
                   },
               },
               kind);
    spec.sigma_xi_sq = 1.0 - spec.tau2 * spec.tau2;
    if (!(spec.kappa2 - spec.kappa1 * spec.kappa1 > 0.0))
        fail(ErrorKind::Numeric, "innovation moment matrix D is not positive definite");
    return spec;
}

std::string InnovationSpec::name() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Normal&) { os << "normal"; },
                   [&](const StandardizedT& t) { os << "t:" << t.df; },
                   [&](const StandardizedSkewedT& st) { os << "st:" << st.df << ':' << st.skew; },
                   [&](const Laplace&) { os << "laplace"; },
               },
               kind_);
    return os.str();
}

double InnovationSpec::pdf(double x) const {
    return std::visit(overloaded{
                          [&](const Normal&) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); },
                          [&](const StandardizedT& t) {
                              const double c = std::sqrt(t.df / (t.df - 2.0));
                              return c * t_pdf(t.df, c * x);
                          },
                          [&](const StandardizedSkewedT& st) {
                              const double z = loc_ + scale_ * x;
                              const double base = z >= 0.0 ? t_pdf(st.df, z / gamma_) : t_pdf(st.df, z * gamma_);
                              return scale_ * 2.0 / (gamma_ + 1.0 / gamma_) * base;
                          },
                          [&](const Laplace&) {
                              const double b = 1.0 / std::numbers::sqrt2;
                              return std::exp(-std::abs(x) / b) / (2.0 * b);
                          },
                      },
                      kind_);
}

double InnovationSpec::draw(Rng& rng) const {
    return std::visit(overloaded{
                          [&](const Normal&) { return std::normal_distribution<double>(0.0, 1.0)(rng); },
                          [&](const StandardizedT& t) {
                              return std::student_t_distribution<double>(t.df)(rng) * std::sqrt((t.df - 2.0) / t.df);
                          },
                          [&](const StandardizedSkewedT& st) {
                              const double a = std::abs(std::student_t_distribution<double>(st.df)(rng));
                              const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                              const double x = u < gamma_ * gamma_ / (1.0 + gamma_ * gamma_) ? a * gamma_ : -a / gamma_;
                              return (x - loc_) / scale_;
                          },
                          [&](const Laplace&) {
                              const double e = std::exponential_distribution<double>(std::numbers::sqrt2)(rng);
                              return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5 ? -e : e;
                          },
                      },
                      kind_);
}

double InnovationSpec::abs_moment(double k) const {
    require(k > 0.0, "absolute moment order must be positive");
    if (std::holds_alternative<Normal>(kind_)) {
        return std::pow(2.0, 0.5 * k) * boost::math::tgamma(0.5 * (k + 1.0)) / std::sqrt(std::numbers::pi);
    }
    if (const auto* t = std::get_if<StandardizedT>(&kind_)) {
        require(k < t->df, "absolute moment does not exist for this df");
        return t_abs_moment(t->df, k) * std::pow((t->df - 2.0) / t->df, 0.5 * k);
    }
    if (std::holds_alternative<Laplace>(kind_)) {
        return std::pow(1.0 / std::numbers::sqrt2, k) * boost::math::tgamma(k + 1.0);
    }
    const double zero[] = {0.0};
    return expect([k](double x) { return std::pow(std::abs(x), k); }, zero);
}

double InnovationSpec::expect(const std::function<double(double)>& f, std::span<const double> breaks,
                              double abs_tol) const {
    // Zero is always a cut so that the tails start near the bulk of the density.
    std::vector<double> cuts(breaks.begin(), breaks.end());
    cuts.push_back(0.0);

    // The skewed-t density has a kink where the underlying t variable crosses zero.
    if (std::holds_alternative<StandardizedSkewedT>(kind_)) {
        cuts.push_back(-loc_ / scale_);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto integrand = [&](double x) {
        const double d = pdf(x);
        return d == 0.0 ? 0.0 : f(x) * d;
    };
    // Tails decay polynomially for t laws, which exp_sinh handles well.
    thread_local boost::math::quadrature::exp_sinh<double> tail;
    thread_local boost::math::quadrature::tanh_sinh<double> inner;
    constexpr double kRelTol = 1e-12;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    double total_err = 0.0;
    const double lo = cuts.front(), hi = cuts.back();
    double err = 0.0;
    total += tail.integrate(integrand, hi, kInf, kRelTol, &err);
    total_err += err;
    total += tail.integrate(integrand, -kInf, lo, kRelTol, &err);
    total_err += err;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        total += inner.integrate(integrand, cuts[i], cuts[i + 1], kRelTol, &err);
        total_err += err;
    }
    if (!std::isfinite(total) || total_err > abs_tol * std::max(1.0, std::abs(total))) {
        std::ostringstream os;
        os << "numeric integration did not converge (error estimate " << total_err << ")";
        fail(ErrorKind::Numeric, os.str());
    }
    return total;
}

InnovationKind parse_innovation(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    require(!parts.empty(), "empty innovation specification");
    const std::string& head = parts[0];
    auto num = [&](std::size_t i, double fallback) {
        if (i >= parts.size()) return fallback;
        try {
            return std::stod(parts[i]);
        } catch (const std::exception&) {
            fail(ErrorKind::Usage, "bad innovation parameter '" + parts[i] + "'");
        }
    };
    if (head == "normal" || head == "n") return Normal{};
    if (head == "laplace") return Laplace{};
    if (head == "st" || head == "skewt") return StandardizedSkewedT{num(1, 5.0), num(2, -1.2)};
    if (head == "t") return StandardizedT{num(1, 5.0)};
    if (head.size() > 1 && head[0] == 't') {
        try {
            return StandardizedT{std::stod(head.substr(1))};
        } catch (const std::exception&) {
        }
    }
    fail(ErrorKind::Usage, "unknown innovation kind '" + text + "'");
}

}  // namespace aldar
