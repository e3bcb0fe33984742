#include "aldar/selection.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "aldar/error.hpp"

namespace aldar {

double bic1(double loglik, int n, int p) {
    require(n > p, "bic1 needs n > p");
    return -2.0 * loglik + (3.0 * p + 1.0) * std::log(static_cast<double>(n - p));
}

double logdet_spd(const Mat& m) {
    Eigen::LDLT<Mat> ldlt(m);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
        fail(ErrorKind::Numeric, "log-determinant of a matrix that is not positive definite");
    return ldlt.vectorD().array().log().sum();
}

double bic2(double loglik, int n, int p, const Mat& sigma_hat) {
    require(n > p, "bic2 needs n > p");
    return -2.0 * loglik + (3.0 * p + 1.0) * std::log(static_cast<double>(n - p) / (2.0 * std::numbers::pi)) +
           logdet_spd(sigma_hat);
}

SelectionReport select_order(const SeriesSample& series, int p_max, const ParamBounds& bounds,
                             const FitOptions& options) {
    require(p_max >= 1, "p_max must be at least 1");
    series.validate(p_max);
    SelectionReport rep;
    rep.p_max = p_max;
    rep.table.resize(static_cast<std::size_t>(p_max));
    const int n = static_cast<int>(series.size());

#pragma omp parallel for schedule(dynamic)
    for (int p = 1; p <= p_max; ++p) {
        SelectionRow& row = rep.table[static_cast<std::size_t>(p - 1)];
        row.p = p;
        try {
            const FitResult fit = fit_qmle(series, p, bounds, options);
            row.loglik = fit.loglik;
            row.bic1 = bic1(fit.loglik, n, p);
            row.logdet_sigma = logdet_spd(fit.sigma_hat);
            row.bic2 = bic2(fit.loglik, n, p, fit.sigma_hat);
            row.ok = fit.converged;
            if (!fit.converged) row.error = "fit did not converge";
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
    }

    double best1 = std::numeric_limits<double>::infinity();
    double best2 = best1;
    for (const auto& row : rep.table) {
        if (!row.ok) continue;
        if (row.bic1 < best1) best1 = row.bic1, rep.p_hat_bic1 = row.p;
        if (row.bic2 < best2) best2 = row.bic2, rep.p_hat_bic2 = row.p;
    }
    if (rep.p_hat_bic1 == 0) fail(ErrorKind::Convergence, "order selection failed: no candidate order could be fitted");
    return rep;
}

}  // namespace aldar
