#pragma once

#include "aldar/estimation.hpp"

namespace aldar {

/// R = (0_{p x (p+1)}, I_p, -I_p), so that R theta = beta+ - beta-.
Mat restriction_matrix(int p);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

struct QlrResult {
    double statistic = 0.0;
    Vec eigenvalues;  // of Psi; the null law is sum_j e_j chi2_1
    double p_value = 1.0;
};

struct AsymmetryTestReport {
    int p = 0;
    TestResult wald;
    TestResult lm;
    QlrResult qlr;
    Mat delta;  // R Sigma^-1 R'
    Mat psi;    // Delta^-1/2 R Xi R' Delta^-1/2
};

/// W_n = n theta' R' (R Xi R')^-1 R theta against chi2_p.
TestResult wald_test(const FitResult& unrestricted);

/// Score test at the restricted estimate, against chi2_p.
TestResult lm_test(const FitResult& restricted, const Regressors& reg);

/// Which fit supplies Sigma and Xi for the weights of the QLR null.
enum class PsiSource { Restricted, Unrestricted };

struct PsiMatrices {
    Mat delta;
    Mat psi;
    Vec eigenvalues;
};
PsiMatrices psi_matrices(const FitResult& fit);

/// Q_n = -2 (L(theta~) - L(theta^)); p-value by Pearson's three-moment
/// chi-square approximation to sum_j e_j chi2_1.
QlrResult qlr_test(const FitResult& restricted, const FitResult& unrestricted,
                   PsiSource source = PsiSource::Restricted);

/// Pearson's three-moment central chi-square approximation of
/// P(sum_j e_j x_j > q) with x_j iid chi2_1.
double pearson_pvalue(const Vec& eigenvalues, double q);

/// theta0 + h / sqrt(n); throws Usage when the result leaves `bounds`.
ModelParams local_alternative_dgp(const ModelParams& theta0, const Vec& h, int n, const ParamBounds& bounds = {});

struct AsymmetryFits {
    FitResult restricted;
    FitResult unrestricted;
};

/// Restricted fit first; its estimate seeds the unrestricted fit as an extra
/// start so that L(theta^) >= L(theta~).
AsymmetryFits fit_both(const Regressors& reg, const ParamBounds& bounds = {}, const FitOptions& options = {});

AsymmetryTestReport asymmetry_tests(const AsymmetryFits& fits, const Regressors& reg,
                                    PsiSource source = PsiSource::Restricted);

}  // namespace aldar
