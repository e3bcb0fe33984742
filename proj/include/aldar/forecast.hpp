#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aldar/estimation.hpp"

namespace aldar {

/// One-step quantile forecasts Q(tau | F_t) with realizations and hits.
struct VarForecastSeries {
    double tau = 0.05;
    std::vector<int> times;  // index of the forecast observation in the series
    std::vector<double> q_forecast;
    std::vector<double> realized;
    std::vector<std::uint8_t> hits;  // realized < q_forecast
};

/// mu + sigma * b_tau, with mu and sigma from the fitted model at `recent_lags`
/// (most recent first) and b_tau the type-7 quantile of the fit's residuals.
double forecast_quantile(const FitResult& fit, std::span<const double> recent_lags, double tau);

struct RollingOptions {
    int window = 522;
    int p = 1;
    std::vector<double> taus{0.05};
    int refit_every = 1;
    FitOptions fit;
    ParamBounds bounds;
    /// Seed each refit with the previous estimate. Runs sequentially.
    bool warm_start = false;
};

struct RollingResult {
    std::vector<VarForecastSeries> series;  // one per tau
    int origins = 0;
    int gaps = 0;  // origins skipped because the fit failed
    std::vector<std::string> gap_messages;
};

/// For each origin t = window..n-1, fits on y[t-window, t) (or reuses the most
/// recent fit per refit_every) and forecasts y[t] at every tau.
RollingResult rolling_backtest(std::span<const double> series, const RollingOptions& options);

double ecr(const VarForecastSeries& f);

struct CoverageTest {
    double statistic = 0.0;
    double p_value = 1.0;
    bool available = false;
    std::string note;
};

/// Christoffersen conditional coverage LR_uc + LR_ind against chi2_2.
CoverageTest cc_test(std::span<const std::uint8_t> hits, double tau);

/// Engle-Manganelli dynamic quantile test with Z = (1, H_{t-1..t-4}, q_t) against chi2_6.
CoverageTest dq_test(const VarForecastSeries& f);

struct BacktestReport {
    double tau = 0.0;
    int forecasts = 0;
    double ecr = 0.0;
    CoverageTest cc;
    CoverageTest dq;
};

BacktestReport backtest_report(const VarForecastSeries& f);

}  // namespace aldar
