#include "aldar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "aldar/error.hpp"
#include "aldar/stats.hpp"

namespace aldar {

double forecast_quantile(const FitResult& fit, std::span<const double> recent_lags, double tau) {
    require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
    require(static_cast<int>(recent_lags.size()) == fit.order(), "need exactly p recent lags");
    if (fit.residuals.size() < 20) fail(ErrorKind::Usage, "too few residuals for an empirical quantile");
    const MeanScale ms = cond_mean_scale(fit.theta_hat, recent_lags);
    const double b = quantile_type7({fit.residuals.data(), static_cast<std::size_t>(fit.residuals.size())}, tau);
    return ms.mu + ms.sigma * b;
}

namespace {

struct OriginForecast {
    bool ok = false;
    std::vector<double> q;
    std::string error;
};

FitResult fit_window(std::span<const double> y, int t, const RollingOptions& o, const std::optional<ModelParams>& warm) {
    const Regressors reg = build_regressors(y.subspan(t - o.window, o.window), o.p);
    FitOptions fo = o.fit;
    if (warm) fo.extra_starts.push_back(*warm);
    return fit_qmle(reg, o.bounds, fo);
}

std::vector<double> quantiles_at(const FitResult& fit, std::span<const double> y, int t, const RollingOptions& o) {
    std::vector<double> lags(o.p);
    for (int i = 0; i < o.p; ++i) lags[i] = y[t - 1 - i];
    std::vector<double> q;
    for (double tau : o.taus) q.push_back(forecast_quantile(fit, lags, tau));
    return q;
}

}  // namespace

RollingResult rolling_backtest(std::span<const double> y, const RollingOptions& o) {
    const int n = static_cast<int>(y.size());
    require(o.p >= 1, "p must be at least 1");
    require(o.window >= 10 * (3 * o.p + 1), "window must be at least 10 (3p+1)");
    require(n > o.window, "series must be longer than the window");
    require(o.refit_every >= 1, "refit_every must be positive");
    require(!o.taus.empty(), "need at least one tau");
    for (double tau : o.taus) require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
    for (double v : y) require(std::isfinite(v), "series contains non-finite values");

    const int origins = n - o.window;
    std::vector<OriginForecast> out(origins);
    const int blocks = (origins + o.refit_every - 1) / o.refit_every;

    auto run_block = [&](int b, std::optional<ModelParams>& warm) {
        const int first = o.window + b * o.refit_every;
        const int last = std::min(n, first + o.refit_every);
        try {
            const FitResult fit = fit_window(y, first, o, warm);
            if (o.warm_start) warm = fit.theta_hat;
            for (int t = first; t < last; ++t) {
                out[t - o.window].q = quantiles_at(fit, y, t, o);
                out[t - o.window].ok = true;
            }
        } catch (const Error& e) {
            for (int t = first; t < last; ++t) out[t - o.window].error = e.what();
        }
    };

    if (o.warm_start) {
        std::optional<ModelParams> warm;
        for (int b = 0; b < blocks; ++b) run_block(b, warm);
    } else {
#pragma omp parallel for schedule(dynamic)
        for (int b = 0; b < blocks; ++b) {
            std::optional<ModelParams> none;
            run_block(b, none);
        }
    }

    RollingResult res;
    res.origins = origins;
    for (double tau : o.taus) {
        VarForecastSeries s;
        s.tau = tau;
        res.series.push_back(std::move(s));
    }
    for (int i = 0; i < origins; ++i) {
        if (!out[i].ok) {
            ++res.gaps;
            res.gap_messages.push_back("origin " + std::to_string(o.window + i) + ": " + out[i].error);
            continue;
        }
        const int t = o.window + i;
        for (std::size_t j = 0; j < o.taus.size(); ++j) {
            auto& s = res.series[j];
            s.times.push_back(t);
            s.q_forecast.push_back(out[i].q[j]);
            s.realized.push_back(y[t]);
            s.hits.push_back(y[t] < out[i].q[j] ? 1 : 0);
        }
    }
    return res;
}

double ecr(const VarForecastSeries& f) {
    require(!f.hits.empty(), "no forecasts");
    double h = 0.0;
    for (auto v : f.hits) h += v;
    return h / static_cast<double>(f.hits.size());
}

namespace {

// n * ln(p), with 0 ln 0 = 0.
double xlogy(double n, double p) { return n == 0.0 ? 0.0 : n * std::log(p); }

}  // namespace

CoverageTest cc_test(std::span<const std::uint8_t> hits, double tau) {
    require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
    CoverageTest out;
    if (hits.size() < 50) {
        out.note = "fewer than 50 forecasts";
        return out;
    }
    double n1 = 0.0;
    for (auto h : hits) n1 += h;
    const double n0 = static_cast<double>(hits.size()) - n1;
    if (n1 == 0.0 || n0 == 0.0) {
        out.note = "degenerate hit sequence";
        return out;
    }
    const double pi = n1 / (n0 + n1);
    const double lr_uc = -2.0 * (xlogy(n1, tau) + xlogy(n0, 1.0 - tau) - xlogy(n1, pi) - xlogy(n0, 1.0 - pi));

    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < hits.size(); ++t) {
        const bool a = hits[t - 1] != 0;
        const bool b = hits[t] != 0;
        (a ? (b ? n11 : n10) : (b ? n01 : n00)) += 1.0;
    }
    const double pi01 = n00 + n01 > 0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = n10 + n11 > 0 ? n11 / (n10 + n11) : 0.0;
    const double pi2 = (n01 + n11) / (n00 + n01 + n10 + n11);
    const double l_markov = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
    const double l_iid = xlogy(n00 + n10, 1.0 - pi2) + xlogy(n01 + n11, pi2);
    const double lr_ind = -2.0 * (l_iid - l_markov);

    out.statistic = std::max(0.0, lr_uc + lr_ind);
    out.p_value = chi2_sf(out.statistic, 2.0);
    out.available = true;
    return out;
}

CoverageTest dq_test(const VarForecastSeries& f) {
    const double tau = f.tau;
    require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
    require(f.hits.size() == f.q_forecast.size(), "hits and forecasts differ in length");
    CoverageTest out;
    const Eigen::Index len = static_cast<Eigen::Index>(f.hits.size());
    if (len < 60) {
        out.note = "fewer than 60 forecasts";
        return out;
    }
    constexpr int kLags = 4;
    const Eigen::Index rows = len - kLags;
    Mat z(rows, kLags + 2);
    Vec hit(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + kLags;
        hit(r) = f.hits[t] - tau;
        z(r, 0) = 1.0;
        for (int k = 1; k <= kLags; ++k) z(r, k) = f.hits[t - k] - tau;
        z(r, kLags + 1) = f.q_forecast[t];
    }
    const Mat ztz = z.transpose() * z;
    Eigen::LDLT<Mat> ldlt(ztz);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-12 ||
        (ldlt.vectorD().array() <= 0.0).any()) {
        out.note = "singular regressor matrix";
        return out;
    }
    const Vec zh = z.transpose() * hit;
    out.statistic = std::max(0.0, zh.dot(ldlt.solve(zh)) / (tau * (1.0 - tau)));
    out.p_value = chi2_sf(out.statistic, kLags + 2);
    out.available = true;
    return out;
}

BacktestReport backtest_report(const VarForecastSeries& f) {
    BacktestReport r;
    r.tau = f.tau;
    r.forecasts = static_cast<int>(f.hits.size());
    r.ecr = ecr(f);
    r.cc = cc_test(f.hits, f.tau);
    r.dq = dq_test(f);
    return r;
}

}  // namespace aldar
