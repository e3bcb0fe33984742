#include <cmath>

#include "aldar/likelihood.hpp"

namespace aldar::serial {

double loglik(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const Vec alpha = theta.head(p);
    const Vec beta = theta.tail(2 * p + 1);
    double total = 0.0;
    for (Eigen::Index r = 0; r < reg.rows(); ++r) {
        const double s = reg.x_lag.row(r).dot(beta);
        const double e = reg.y_resp(r) - reg.y_lag.row(r).dot(alpha);
        total += -std::log(s) - e * e / (2.0 * s * s);
    }
    return total;
}

Vec score(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const Vec alpha = theta.head(p);
    const Vec beta = theta.tail(2 * p + 1);
    Vec g = Vec::Zero(theta.size());
    for (Eigen::Index r = 0; r < reg.rows(); ++r) {
        const Vec y = reg.y_lag.row(r).transpose();
        const Vec x = reg.x_lag.row(r).transpose();
        const double s = x.dot(beta);
        const double e = reg.y_resp(r) - y.dot(alpha);
        g.head(p) += y * e / (s * s);
        g.tail(2 * p + 1) -= x / s * (1.0 - e * e / (s * s));
    }
    return g;
}

Mat hessian(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const int q = 2 * p + 1;
    const Vec alpha = theta.head(p);
    const Vec beta = theta.tail(q);
    Mat h = Mat::Zero(theta.size(), theta.size());
    for (Eigen::Index r = 0; r < reg.rows(); ++r) {
        const Vec y = reg.y_lag.row(r).transpose();
        const Vec x = reg.x_lag.row(r).transpose();
        const double s = x.dot(beta);
        const double e = reg.y_resp(r) - y.dot(alpha);
        h.topLeftCorner(p, p) -= y * y.transpose() / (s * s);
        h.topRightCorner(p, q) -= 2.0 * e * y * x.transpose() / (s * s * s);
        h.bottomRightCorner(q, q) += x * x.transpose() / (s * s) * (1.0 - 3.0 * e * e / (s * s));
    }
    h.bottomLeftCorner(q, p) = h.topRightCorner(p, q).transpose();
    return h;
}

Mat sigma_sum(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const int q = 2 * p + 1;
    const Vec beta = theta.tail(q);
    Mat out = Mat::Zero(theta.size(), theta.size());
    for (Eigen::Index r = 0; r < reg.rows(); ++r) {
        const Vec y = reg.y_lag.row(r).transpose();
        const Vec x = reg.x_lag.row(r).transpose();
        const double s2 = std::pow(x.dot(beta), 2);
        out.topLeftCorner(p, p) += y * y.transpose() / s2;
        out.bottomRightCorner(q, q) += 2.0 * x * x.transpose() / s2;
    }
    return out;
}

}  // namespace aldar::serial
