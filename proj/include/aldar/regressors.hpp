#pragma once

#include <span>

#include <Eigen/Dense>

#include "aldar/model.hpp"

namespace aldar {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Lagged design for t = p+1..n. Row r (time t = p+1+r) holds
/// Y_{t-1} = (y_{t-1},...,y_{t-p}) and X_{t-1} = (1, y+_{t-1..t-p}, -y-_{t-1..t-p}).
struct Regressors {
    RowMat y_lag;
    RowMat x_lag;
    Vec y_resp;

    [[nodiscard]] int order() const noexcept { return static_cast<int>(y_lag.cols()); }
    [[nodiscard]] Eigen::Index rows() const noexcept { return y_resp.size(); }
    /// Number of observations n of the underlying series.
    [[nodiscard]] Eigen::Index series_length() const noexcept { return rows() + order(); }
};

Regressors build_regressors(std::span<const double> series, int p);
inline Regressors build_regressors(const SeriesSample& s, int p) { return build_regressors(s.values, p); }

}  // namespace aldar
