#pragma once

#include <string>
#include <vector>

#include "aldar/estimation.hpp"

namespace aldar {

/// -2 L_n + (3p+1) ln(n - p)
double bic1(double loglik, int n, int p);

/// -2 L_n + (3p+1) ln((n - p) / (2 pi)) + ln det(sigma_hat), the log
/// determinant taken from an LDLT factorization.
double bic2(double loglik, int n, int p, const Mat& sigma_hat);

/// ln det of a symmetric positive definite matrix; throws Numeric otherwise.
double logdet_spd(const Mat& m);

struct SelectionRow {
    int p = 0;
    bool ok = false;
    double loglik = 0.0;
    double bic1 = 0.0;
    double bic2 = 0.0;
    double logdet_sigma = 0.0;
    std::string error;
};

struct SelectionReport {
    int p_max = 0;
    std::vector<SelectionRow> table;
    int p_hat_bic1 = 0;
    int p_hat_bic2 = 0;
};

/// Fits every order 1..p_max on the full series. Rows whose fit throws or
/// does not converge are marked failed and skipped by the argmins.
SelectionReport select_order(const SeriesSample& series, int p_max, const ParamBounds& bounds = {},
                             const FitOptions& options = {});

}  // namespace aldar
