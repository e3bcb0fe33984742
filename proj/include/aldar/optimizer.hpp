#pragma once

#include <functional>
#include <vector>

#include "aldar/model.hpp"

namespace aldar {

/// Smooth objective to be minimized over a box.
struct BoxObjective {
    std::function<double(const Vec&)> value;
    /// Fills value, gradient and Hessian at x.
    std::function<void(const Vec&, double&, Vec&, Mat&)> derivatives;
};

struct NewtonOptions {
    int max_iter = 200;
    double pg_tol = 1e-7;  // on ||x - P(x - grad)||_2
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct NewtonStep {
    int iter;
    double f;
    double pg_norm;
    double step;
    int active;
};

struct NewtonResult {
    Vec x;
    double f = 0.0;
    double pg_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    std::vector<NewtonStep> trace;
};

/// Projected Newton method for bound constraints (Bertsekas 1982): variables
/// at a bound with the gradient pointing outward are fixed, a Newton step is
/// taken in the remaining ones and the trial point is projected back onto the
/// box, with Armijo backtracking along the projection arc.
NewtonResult projected_newton(const BoxObjective& obj, Vec x0, const Vec& lower, const Vec& upper,
                              const NewtonOptions& options = {});

/// Euclidean projection onto [lower, upper].
inline Vec project_box(const Vec& x, const Vec& lower, const Vec& upper) { return x.cwiseMax(lower).cwiseMin(upper); }

}  // namespace aldar
