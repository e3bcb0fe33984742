#include "aldar/optimizer.hpp"

#include <cmath>
#include <limits>

namespace aldar {
namespace {

double projected_gradient_norm(const Vec& x, const Vec& g, const Vec& lo, const Vec& hi) {
    return (x - project_box(x - g, lo, hi)).norm();
}

// Newton direction on the free set; Hessian shifted until positive definite.
Vec free_newton_direction(const Mat& hess, const Vec& grad, const std::vector<int>& free_idx) {
    const auto m = static_cast<Eigen::Index>(free_idx.size());
    Mat hf(m, m);
    Vec gf(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        gf(i) = grad(free_idx[i]);
        for (Eigen::Index j = 0; j < m; ++j) hf(i, j) = hess(free_idx[i], free_idx[j]);
    }
    const double scale = std::max(1e-12, hf.diagonal().cwiseAbs().maxCoeff());
    double shift = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        Mat shifted = hf;
        shifted.diagonal().array() += shift;
        Eigen::LLT<Mat> llt(shifted);
        if (llt.info() == Eigen::Success) {
            Vec d = llt.solve(-gf);
            if (d.allFinite() && d.dot(gf) < 0.0) return d;
        }
        shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
    }
    return -gf / scale;
}

}  // namespace

NewtonResult projected_newton(const BoxObjective& obj, Vec x0, const Vec& lower, const Vec& upper,
                              const NewtonOptions& options) {
    const auto n = x0.size();
    NewtonResult res;
    res.x = project_box(x0, lower, upper);

    double f = 0.0;
    Vec g(n);
    Mat h(n, n);
    obj.derivatives(res.x, f, g, h);
    if (!std::isfinite(f)) {
        res.f = f;
        res.line_search_failed = true;
        return res;
    }

    for (int iter = 0;; ++iter) {
        const double pg = projected_gradient_norm(res.x, g, lower, upper);
        res.f = f;
        res.pg_norm = pg;
        res.iterations = iter;
        if (pg <= options.pg_tol) {
            res.converged = true;
            return res;
        }
        if (iter >= options.max_iter) return res;

        const double eps = std::min(1e-3, pg);
        std::vector<int> free_idx;
        Vec dir = Vec::Zero(n);
        int active = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_lo = res.x(i) - lower(i) <= eps && g(i) > 0.0;
            const bool at_hi = upper(i) - res.x(i) <= eps && g(i) < 0.0;
            if (at_lo || at_hi) {
                dir(i) = -g(i) / std::max(std::abs(h(i, i)), 1e-12);
                ++active;
            } else {
                free_idx.push_back(static_cast<int>(i));
            }
        }
        if (!free_idx.empty()) {
            const Vec df = free_newton_direction(h, g, free_idx);
            for (std::size_t k = 0; k < free_idx.size(); ++k) dir(free_idx[k]) = df(static_cast<Eigen::Index>(k));
        }

        auto search = [&](const Vec& d, double s0, Vec& x_new, double& f_new, double& step) {
            double s = s0;
            for (int b = 0; b < options.max_backtracks; ++b, s *= 0.5) {
                Vec trial = project_box(res.x + s * d, lower, upper);
                if ((trial - res.x).norm() == 0.0) return false;
                const double decrease = g.dot(trial - res.x);
                if (decrease >= 0.0) continue;
                const double ft = obj.value(trial);
                if (std::isfinite(ft) && ft <= f + options.armijo * decrease) {
                    x_new = std::move(trial);
                    f_new = ft;
                    step = s;
                    return true;
                }
            }
            return false;
        };

        Vec x_new;
        double f_new = f;
        double step = 0.0;
        bool ok = search(dir, 1.0, x_new, f_new, step);
        if (!ok) {
            // Projected steepest descent as a fallback.
            const double gn = g.norm();
            ok = gn > 0.0 && search(-g, 1.0 / gn, x_new, f_new, step);
        }
        if (!ok) {
            res.line_search_failed = true;
            return res;
        }
        res.trace.push_back({iter, f_new, pg, step, active});
        res.x = std::move(x_new);
        obj.derivatives(res.x, f, g, h);
    }
}

}  // namespace aldar
