#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aldar/rng.hpp"

namespace aldar {

struct Normal {};
struct StandardizedT {
    double df;
};
/// Fernandez-Steel skewed t, affinely standardized. The base variable has
/// density 2/(g+1/g) * [f_df(x/g) 1{x>=0} + f_df(g x) 1{x<0}] with
/// g = exp(kSkewScale * skew), so negative skew values give left skew.
struct StandardizedSkewedT {
    double df;
    double skew;
};
/// Laplace with unit variance. Only used for stationarity-region scans.
struct Laplace {};

using InnovationKind = std::variant<Normal, StandardizedT, StandardizedSkewedT, Laplace>;

inline constexpr double kSkewScale = 0.5;

/// Innovation law with mean 0 and variance 1 plus the moment functionals the
/// inference procedures need.
class InnovationSpec {
public:
    [[nodiscard]] const InnovationKind& kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;

    double kappa1 = 0.0;       // E(eta^3)
    double kappa2 = 2.0;       // E(eta^4) - 1
    double tau1 = 0.0;         // E sgn(eta)
    double tau2 = 0.0;         // E|eta|
    double sigma_xi_sq = 0.0;  // 1 - tau2^2

    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double draw(Rng& rng) const;

    /// E|eta|^k for k > 0.
    [[nodiscard]] double abs_moment(double k) const;

    /// E f(eta) by adaptive Gauss-Kronrod on the real line, split at `breaks`
    /// (points where f is not smooth). Throws Numeric if the error estimate
    /// exceeds `abs_tol`.
    [[nodiscard]] double expect(const std::function<double(double)>& f, std::span<const double> breaks = {},
                                double abs_tol = 1e-8) const;

private:
    friend InnovationSpec make_innovation(const InnovationKind& kind);

    InnovationKind kind_{Normal{}};
    // Affine standardization of the skewed-t base variable: eta = (x - loc) / scale.
    double loc_ = 0.0;
    double scale_ = 1.0;
    double gamma_ = 1.0;
};

InnovationSpec make_innovation(const InnovationKind& kind);

/// Parses "normal", "t5", "t:5", "st", "st:5:-1.2", "laplace".
InnovationKind parse_innovation(const std::string& text);

}  // namespace aldar
