#pragma once

#include <vector>

#include "aldar/model.hpp"

namespace aldar {

/// sum_i max{E|a_i - b-_i eta|^k, E|a_i + b+_i eta|^k} for 0 < k <= 1.
/// A value below one certifies a strictly stationary, geometrically ergodic
/// solution with E|y|^k finite.
double stationarity_margin_case1(const ModelParams& params, const InnovationSpec& innov, double kappa);

/// E[(sum_i max{|a_i + b+_i eta|, |a_i - b-_i eta|})^k] for integer k >= 2.
double stationarity_margin_case2(const ModelParams& params, const InnovationSpec& innov, int kappa);

/// Margin for either regime: kappa in (0,1] or an integer >= 2.
double stationarity_margin(const ModelParams& params, const InnovationSpec& innov, double kappa);

/// Order-one scan with beta+ = d * beta-: for each alpha in the grid, the
/// largest beta- whose margin stays below one (bisection to 1e-5), or 0.
std::vector<double> stationarity_boundary(const InnovationSpec& innov, double kappa, double d,
                                          const std::vector<double>& alpha_grid);

}  // namespace aldar
