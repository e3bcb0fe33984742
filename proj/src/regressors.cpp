#include "aldar/regressors.hpp"

#include <sstream>

#include "aldar/error.hpp"

namespace aldar {

Regressors build_regressors(std::span<const double> series, int p) {
    require(p >= 1, "model order must be positive");
    const auto n = static_cast<Eigen::Index>(series.size());
    if (n <= p) {
        std::ostringstream os;
        os << "series too short: " << n << " observations for order " << p;
        fail(ErrorKind::Usage, os.str());
    }
    const Eigen::Index rows = n - p;
    Regressors reg;
    reg.y_lag.resize(rows, p);
    reg.x_lag.resize(rows, 2 * p + 1);
    reg.y_resp.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + p;
        reg.y_resp(r) = series[t];
        reg.x_lag(r, 0) = 1.0;
        for (int i = 0; i < p; ++i) {
            const double y = series[t - 1 - i];
            reg.y_lag(r, i) = y;
            reg.x_lag(r, 1 + i) = y > 0.0 ? y : 0.0;
            reg.x_lag(r, 1 + p + i) = y < 0.0 ? -y : 0.0;
        }
    }
    return reg;
}

}  // namespace aldar
