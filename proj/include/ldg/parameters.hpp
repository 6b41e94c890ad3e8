#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ldg {

/// Thrown when a parameter set or configuration violates a precondition.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Material and geometry constants of the reduced Landau-de Gennes model.
///
/// `lambda_bar_sq` is the rescaled domain size 2*C*lambda^2/L; the factor
/// lambda^2/L multiplying the bulk density is therefore `bulk_weight()`.
struct Parameters {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double L2 = 0.0;
    double lambda_bar_sq = 0.0;
    double epsilon = 0.05;
    double s_plus = 0.0;

    [[nodiscard]] double bulk_weight() const { return lambda_bar_sq / (2.0 * C); }

    /// min f_b = A s^2/3 - 2 B s^3/27 + C s^4/9, attained on both bulk wells.
    [[nodiscard]] double min_bulk() const {
        const double s = s_plus;
        return A * s * s / 3.0 - 2.0 * B * s * s * s / 27.0 + C * s * s * s * s / 9.0;
    }

    /// True at the special temperature A = -B^2/(3C) used by the asymptotic expansions.
    [[nodiscard]] bool at_special_temperature(double rel_tol = 1e-12) const {
        const double a_star = -B * B / (3.0 * C);
        return std::abs(A - a_star) <= rel_tol * std::abs(a_star);
    }

    [[nodiscard]] Parameters with_lambda_bar_sq(double v) const {
        Parameters p = *this;
        p.lambda_bar_sq = v;
        return p;
    }
    [[nodiscard]] Parameters with_L2(double v) const {
        Parameters p = *this;
        p.L2 = v;
        return p;
    }
};

inline double compute_s_plus(double A, double B, double C) {
    return (B + std::sqrt(B * B + 24.0 * std::abs(A) * C)) / (4.0 * C);
}

/// Validates the constants and fills in s_plus.
///
/// A >= 0 is accepted (s_plus is still evaluated with |A|) but the bulk wells
/// only describe the nematic phase for A < 0; callers that care check `A < 0`.
inline Parameters make_parameters(double A, double B, double C, double L2, double lambda_bar_sq,
                                  double epsilon) {
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    if (!(B > 0.0)) throw ConfigError("B must be positive");
    if (!(L2 > -1.0)) throw ConfigError("L2 <= -1: elastic energy not coercive");
    if (!(lambda_bar_sq >= 0.0)) throw ConfigError("lambda_bar_sq must be non-negative");
    if (!(epsilon > 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must lie in (0, 0.5)");
    Parameters p;
    p.A = A;
    p.B = B;
    p.C = C;
    p.L2 = L2;
    p.lambda_bar_sq = lambda_bar_sq;
    p.epsilon = epsilon;
    p.s_plus = compute_s_plus(A, B, C);
    return p;
}

inline constexpr double kDefaultB = 0.64e4;
inline constexpr double kDefaultC = 0.35e4;

/// Defaults used throughout: B = 0.64e4, C = 0.35e4, A = -B^2/(3C), so s_plus = B/C.
inline Parameters default_parameters(double L2 = 0.0, double lambda_bar_sq = 5.0,
                                     double epsilon = 0.05) {
    const double A = -kDefaultB * kDefaultB / (3.0 * kDefaultC);
    return make_parameters(A, kDefaultB, kDefaultC, L2, lambda_bar_sq, epsilon);
}

}  // namespace ldg
