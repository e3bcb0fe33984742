#pragma once

#include "aldar/regressors.hpp"

namespace aldar {

/// Gaussian quasi-log-likelihood (constant dropped),
///   L_n = sum_t [-ln(b'X_{t-1}) - (y_t - a'Y_{t-1})^2 / (2 (b'X_{t-1})^2)],
/// with analytic first and second derivatives in the flat parameter layout.
///
/// These kernels split the rows into fixed-size chunks, reduce each chunk in
/// an OpenMP parallel loop and add the chunk partials in chunk order, so the
/// result is bit-identical for every thread count. Inside an enclosing
/// parallel region they run on the calling thread only.
double loglik(const Vec& theta, const Regressors& reg);
Vec score(const Vec& theta, const Regressors& reg);
Mat hessian(const Vec& theta, const Regressors& reg);

struct Derivatives {
    double value = 0.0;
    Vec grad;
    Mat hess;
};

/// Value, score and Hessian in a single pass.
Derivatives loglik_derivatives(const Vec& theta, const Regressors& reg);

/// Per-observation scores, one row per t.
RowMat score_rows(const Vec& theta, const Regressors& reg);

/// Sum over t of blockdiag(YY'/(b'X)^2, 2XX'/(b'X)^2).
Mat sigma_sum(const Vec& theta, const Regressors& reg);

/// Standardized residuals (y_t - a'Y_{t-1}) / (b'X_{t-1}).
Vec residuals(const Vec& theta, const Regressors& reg);

inline constexpr Eigen::Index kKernelChunk = 512;

/// Straightforward single-threaded implementations, kept as the reference
/// the chunked kernels are tested and benchmarked against.
namespace serial {
double loglik(const Vec& theta, const Regressors& reg);
Vec score(const Vec& theta, const Regressors& reg);
Mat hessian(const Vec& theta, const Regressors& reg);
Mat sigma_sum(const Vec& theta, const Regressors& reg);
}  // namespace serial

}  // namespace aldar
