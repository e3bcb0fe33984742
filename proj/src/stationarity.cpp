#include "aldar/stationarity.hpp"

#include <algorithm>
#include <cmath>

#include "aldar/error.hpp"

namespace aldar {
namespace {

// E|a + b eta|^k; the integrand has a kink at eta = -a/b.
double abs_affine_moment(const InnovationSpec& innov, double a, double b, double k) {
    if (b == 0.0) return std::pow(std::abs(a), k);
    if (a == 0.0) return std::pow(std::abs(b), k) * innov.abs_moment(k);
    const double kink[] = {-a / b};
    return innov.expect([=](double x) { return std::pow(std::abs(a + b * x), k); }, kink);
}

}  // namespace

double stationarity_margin_case1(const ModelParams& params, const InnovationSpec& innov, double kappa) {
    require(kappa > 0.0 && kappa <= 1.0, "case-1 margin needs 0 < kappa <= 1");
    params.validate();
    double total = 0.0;
    for (int i = 0; i < params.order(); ++i) {
        const double a = params.alpha(i);
        const double neg = abs_affine_moment(innov, a, -params.beta_minus(i), kappa);
        const double pos = abs_affine_moment(innov, a, params.beta_plus(i), kappa);
        total += std::max(neg, pos);
    }
    return total;
}

double stationarity_margin_case2(const ModelParams& params, const InnovationSpec& innov, int kappa) {
    require(kappa >= 2, "case-2 margin needs an integer kappa >= 2");
    params.validate();
    const int p = params.order();
    std::vector<double> breaks{0.0};
    for (int i = 0; i < p; ++i) {
        const double a = params.alpha(i), bp = params.beta_plus(i), bm = params.beta_minus(i);
        if (bp > 0.0) breaks.push_back(-a / bp);
        if (bm > 0.0) breaks.push_back(a / bm);
        if (bm != bp) breaks.push_back(2.0 * a / (bm - bp));
    }
    auto integrand = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < p; ++i) {
            const double a = params.alpha(i);
            s += std::max(std::abs(a + params.beta_plus(i) * x), std::abs(a - params.beta_minus(i) * x));
        }
        return std::pow(s, kappa);
    };
    return innov.expect(integrand, breaks);
}

double stationarity_margin(const ModelParams& params, const InnovationSpec& innov, double kappa) {
    if (kappa > 0.0 && kappa <= 1.0) return stationarity_margin_case1(params, innov, kappa);
    require(kappa >= 2.0 && kappa == std::floor(kappa), "kappa must lie in (0,1] or be an integer >= 2");
    return stationarity_margin_case2(params, innov, static_cast<int>(kappa));
}

std::vector<double> stationarity_boundary(const InnovationSpec& innov, double kappa, double d,
                                          const std::vector<double>& alpha_grid) {
    require(d > 0.0, "asymmetry ratio d must be positive");
    constexpr int kScan = 100;
    constexpr double kTol = 1e-5;

    std::vector<double> out;
    out.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        auto margin = [&](double b) {
            ModelParams m(Vec::Constant(1, a), 1.0, Vec::Constant(1, d * b), Vec::Constant(1, b));
            return stationarity_margin(m, innov, kappa);
        };
        // The margin grows without bound in beta, so some cap fails.
        double cap = 1.0;
        while (margin(cap) < 1.0 && cap < 1e4) cap *= 2.0;

        double lo = -1.0;
        double hi = cap;
        for (int k = kScan; k >= 1; --k) {
            const double b = cap * k / kScan;
            if (margin(b) < 1.0) {
                lo = b;
                hi = k == kScan ? cap : cap * (k + 1) / kScan;
                break;
            }
        }
        if (lo < 0.0) {
            // Region, if any, is narrower than one scan step.
            const double tiny = 1e-9;
            if (margin(tiny) >= 1.0) {
                out.push_back(0.0);
                continue;
            }
            lo = tiny;
            hi = cap / kScan;
        }
        while (hi - lo > kTol) {
            const double mid = 0.5 * (lo + hi);
            (margin(mid) < 1.0 ? lo : hi) = mid;
        }
        out.push_back(lo);
    }
    return out;
}

}  // namespace aldar
