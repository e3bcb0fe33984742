#include "aldar/likelihood.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace aldar {
namespace {

enum Need : unsigned { kValue = 1u, kGrad = 2u, kHess = 4u };

struct Partial {
    double value = 0.0;
    Vec grad;
    Mat hess;  // upper triangle only until finalized
};

// Accumulates rows [begin, end) into `acc`.
void accumulate(const double* theta, const Regressors& reg, Eigen::Index begin, Eigen::Index end, unsigned need,
                Partial& acc) {
    const int p = reg.order();
    const int q = 2 * p + 1;
    const double* alpha = theta;
    const double* beta = theta + p;
    for (Eigen::Index r = begin; r < end; ++r) {
        const double* yl = reg.y_lag.row(r).data();
        const double* xl = reg.x_lag.row(r).data();
        double s = 0.0;
        for (int j = 0; j < q; ++j) s += beta[j] * xl[j];
        double e = reg.y_resp(r);
        for (int i = 0; i < p; ++i) e -= alpha[i] * yl[i];
        const double inv = 1.0 / s;
        const double inv2 = inv * inv;
        const double u = e * e * inv2;
        if (need & kValue) acc.value += -std::log(s) - 0.5 * u;
        if (need & kGrad) {
            const double ga = e * inv2;
            const double gb = -inv * (1.0 - u);
            for (int i = 0; i < p; ++i) acc.grad(i) += ga * yl[i];
            for (int j = 0; j < q; ++j) acc.grad(p + j) += gb * xl[j];
        }
        if (need & kHess) {
            const double waa = -inv2;
            const double wab = -2.0 * e * inv2 * inv;
            const double wbb = inv2 * (1.0 - 3.0 * u);
            for (int i = 0; i < p; ++i) {
                for (int k = i; k < p; ++k) acc.hess(i, k) += waa * yl[i] * yl[k];
                for (int k = 0; k < q; ++k) acc.hess(i, p + k) += wab * yl[i] * xl[k];
            }
            for (int j = 0; j < q; ++j)
                for (int k = j; k < q; ++k) acc.hess(p + j, p + k) += wbb * xl[j] * xl[k];
        }
    }
}

Partial reduce(const Vec& theta, const Regressors& reg, unsigned need) {
    const Eigen::Index rows = reg.rows();
    const int d = static_cast<int>(theta.size());
    const Eigen::Index chunks = (rows + kKernelChunk - 1) / kKernelChunk;
    std::vector<Partial> parts(static_cast<std::size_t>(chunks));
    for (auto& part : parts) {
        if (need & kGrad) part.grad = Vec::Zero(d);
        if (need & kHess) part.hess = Mat::Zero(d, d);
    }
#pragma omp parallel for schedule(static) if (chunks > 1)
    for (Eigen::Index c = 0; c < chunks; ++c) {
        const Eigen::Index begin = c * kKernelChunk;
        const Eigen::Index end = std::min(rows, begin + kKernelChunk);
        accumulate(theta.data(), reg, begin, end, need, parts[static_cast<std::size_t>(c)]);
    }
    Partial total;
    if (need & kGrad) total.grad = Vec::Zero(d);
    if (need & kHess) total.hess = Mat::Zero(d, d);
    for (const auto& part : parts) {
        total.value += part.value;
        if (need & kGrad) total.grad += part.grad;
        if (need & kHess) total.hess += part.hess;
    }
    if (need & kHess) total.hess.triangularView<Eigen::StrictlyLower>() = total.hess.transpose();
    return total;
}

}  // namespace

double loglik(const Vec& theta, const Regressors& reg) { return reduce(theta, reg, kValue).value; }

Vec score(const Vec& theta, const Regressors& reg) { return reduce(theta, reg, kGrad).grad; }

Mat hessian(const Vec& theta, const Regressors& reg) { return reduce(theta, reg, kHess).hess; }

Derivatives loglik_derivatives(const Vec& theta, const Regressors& reg) {
    Partial all = reduce(theta, reg, kValue | kGrad | kHess);
    return {all.value, std::move(all.grad), std::move(all.hess)};
}

RowMat score_rows(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const Eigen::Index rows = reg.rows();
    RowMat out(rows, theta.size());
    const Vec alpha = theta.head(p);
    const Vec beta = theta.tail(2 * p + 1);
#pragma omp parallel for schedule(static) if (rows > kKernelChunk)
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double s = reg.x_lag.row(r).dot(beta);
        const double e = reg.y_resp(r) - reg.y_lag.row(r).dot(alpha);
        const double inv2 = 1.0 / (s * s);
        out.row(r).head(p) = (e * inv2) * reg.y_lag.row(r);
        out.row(r).tail(2 * p + 1) = (-(1.0 - e * e * inv2) / s) * reg.x_lag.row(r);
    }
    return out;
}

Mat sigma_sum(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const int q = 2 * p + 1;
    const Eigen::Index rows = reg.rows();
    const Eigen::Index chunks = (rows + kKernelChunk - 1) / kKernelChunk;
    const Vec beta = theta.tail(q);
    std::vector<Mat> parts(static_cast<std::size_t>(chunks), Mat::Zero(p + q, p + q));
#pragma omp parallel for schedule(static) if (chunks > 1)
    for (Eigen::Index c = 0; c < chunks; ++c) {
        Mat& acc = parts[static_cast<std::size_t>(c)];
        const Eigen::Index end = std::min(rows, (c + 1) * kKernelChunk);
        for (Eigen::Index r = c * kKernelChunk; r < end; ++r) {
            const double s = reg.x_lag.row(r).dot(beta);
            const double w = 1.0 / (s * s);
            acc.topLeftCorner(p, p).noalias() += w * reg.y_lag.row(r).transpose() * reg.y_lag.row(r);
            acc.bottomRightCorner(q, q).noalias() += (2.0 * w) * reg.x_lag.row(r).transpose() * reg.x_lag.row(r);
        }
    }
    Mat total = Mat::Zero(p + q, p + q);
    for (const auto& part : parts) total += part;
    return total;
}

Vec residuals(const Vec& theta, const Regressors& reg) {
    const int p = reg.order();
    const Vec alpha = theta.head(p);
    const Vec beta = theta.tail(2 * p + 1);
    return (reg.y_resp - reg.y_lag * alpha).cwiseQuotient(reg.x_lag * beta);
}

}  // namespace aldar
