#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "aldar/likelihood.hpp"
#include "aldar/model.hpp"

namespace testing {

using aldar::Mat;
using aldar::Vec;

/// Plain loop log-likelihood written directly from the model equation.
inline double naive_loglik(const aldar::ModelParams& m, const std::vector<double>& y) {
    const int p = m.order();
    double total = 0.0;
    for (std::size_t t = p; t < y.size(); ++t) {
        double mu = 0.0;
        double s = m.omega;
        for (int i = 0; i < p; ++i) {
            const double v = y[t - 1 - i];
            mu += m.alpha(i) * v;
            s += m.beta_plus(i) * std::max(v, 0.0) - m.beta_minus(i) * std::min(v, 0.0);
        }
        const double e = y[t] - mu;
        total += -std::log(s) - e * e / (2.0 * s * s);
    }
    return total;
}

inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
    Vec g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        const double step = h * std::max(1.0, std::abs(x(i)));
        a(i) += step;
        b(i) -= step;
        g(i) = (f(a) - f(b)) / (2.0 * step);
    }
    return g;
}

inline Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const Vec f0 = f(x);
    Mat j(f0.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        const double step = h * std::max(1.0, std::abs(x(i)));
        a(i) += step;
        b(i) -= step;
        j.col(i) = (f(a) - f(b)) / (2.0 * step);
    }
    return j;
}

inline double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace testing
