#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ldg/energy.hpp"
#include "ldg/grid.hpp"
#include "ldg/newton.hpp"
#include "ldg/parameters.hpp"
#include "ldg/residual.hpp"
#include "ldg/state.hpp"

namespace ldg {

// ---------------------------------------------------------------------------
// Large-L2 limit

/// Interior values of the Constant limit together with the tangent boundary trace.
struct LargeL2Limit {
    double rho = 0.0;
    double sigma = 0.0;
    double tau = 0.0;
    State fields;
};

inline LargeL2Limit limit_fields_large_L2(const Grid& g, const Parameters& p) {
    LargeL2Limit out;
    out.tau = p.s_plus / 3.0;
    out.fields = make_state(g, p, 0.0, 0.0, out.tau);
    return out;
}

/// The four edge equations a constant interior (a, b, c) must satisfy for
/// f_div to vanish on one-sided boundary differences.
inline std::array<double, 4> corner_consistency_residual(double a, double b, double c,
                                                         double s_plus) {
    const double s = s_plus;
    const double e1 = a + s / 2 - c - s / 6;
    const double e3 = -a + s / 2 - c - s / 6;
    return {e1 * e1 + b * b, e1 * e1 + b * b, b * b + e3 * e3, b * b + e3 * e3};
}

/// det(A alpha^2 + 2 B alpha beta + C beta^2) for the principal part of the
/// leading-order large-L2 system.
inline double large_L2_symbol_determinant(double alpha, double beta) {
    Eigen::Matrix3d A, B, C;
    A << 0.5, 0, -0.5, 0, 0.5, 0, -1.0 / 6, 0, 1.0 / 6;
    B << 0, 0, 0, 0, 0, -0.5, 0, -1.0 / 6, 0;
    C << 0.5, 0, 0.5, 0, 0.5, 0, 1.0 / 6, 0, 1.0 / 6;
    return (A * alpha * alpha + 2.0 * B * alpha * beta + C * beta * beta).determinant();
}

// ---------------------------------------------------------------------------
// Large-lambda limit: theta-harmonic D and R states

enum class ThetaBoundary { D, R };

inline const char* to_string(ThetaBoundary k) { return k == ThetaBoundary::D ? "D" : "R"; }

/// Piecewise constant angle data, blended linearly to the mean of the two
/// adjacent edge values within `eps` of each corner.
inline double theta_boundary(ThetaBoundary kind, double x, double y, double eps) {
    const double half_pi = std::numbers::pi / 2.0;
    auto edge_x = [&](double xs) {
        if (kind == ThetaBoundary::D) return half_pi;
        return xs < 0 ? half_pi : -half_pi;
    };
    const bool horizontal = std::abs(std::abs(y) - 1.0) <= 1e-12;
    const bool vertical = std::abs(std::abs(x) - 1.0) <= 1e-12;
    if (!horizontal && !vertical) throw std::invalid_argument("point is not on the boundary");
    if (horizontal && vertical) return 0.5 * edge_x(x);
    if (horizontal) {
        const double d = 1.0 - std::abs(x);
        if (d >= eps) return 0.0;
        const double mean = 0.5 * edge_x(x);
        return mean + (0.0 - mean) * d / eps;
    }
    const double d = 1.0 - std::abs(y);
    const double v = edge_x(x);
    if (d >= eps) return v;
    const double mean = 0.5 * v;
    return mean + (v - mean) * d / eps;
}

/// Discrete harmonic angle field with D or R data.
inline ScalarField theta_harmonic(const Grid& g, ThetaBoundary kind, double eps) {
    ScalarField u(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            if (g.is_boundary(i, j)) u(i, j) = theta_boundary(kind, g.x(i), g.y(j), eps);
    ScalarSolveResult r =
        solve_scalar_pde(ScalarPdeKind::laplace_theta, g, ScalarPdeData{u, {}, {}, {}, {}},
                         default_parameters());
    if (!r.report.converged) throw std::runtime_error("laplace_theta: " + r.report.message);
    return r.u;
}

/// s^2 (1 + L2/2) times the discrete Dirichlet integral of theta, omitting
/// edges whose midpoint lies within `eps` of a corner.
inline double J_infty_numeric(const Grid& g, const ScalarField& theta, double L2, double s_plus,
                              double eps) {
    const int n = g.n();
    auto near_corner = [&](double x, double y) {
        return std::hypot(1.0 - std::abs(x), 1.0 - std::abs(y)) < eps;
    };
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            if (near_corner(g.x(i) + 0.5 * g.h(), g.y(j))) continue;
            const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            const double d = theta(i + 1, j) - theta(i, j);
            sum += w * d * d;
        }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (near_corner(g.x(i), g.y(j) + 0.5 * g.h())) continue;
            const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            const double d = theta(i, j + 1) - theta(i, j);
            sum += w * d * d;
        }
    return s_plus * s_plus * (1.0 + L2 / 2.0) * sum;
}

/// s1 = 2 sum (coth((2k+1) pi) - 1)/(2k+1), summed until terms drop below 1e-17.
inline double series_s1(int max_terms = 1000) {
    double sum = 0.0;
    for (int k = 0; k < max_terms; ++k) {
        const double a = (2 * k + 1) * std::numbers::pi;
        const double term = 2.0 / std::expm1(2.0 * a) / (2 * k + 1);  // coth a - 1
        sum += term;
        if (term < 1e-17) break;
    }
    return 2.0 * sum;
}

/// s2 = 2 sum csch((2k+1) pi)/(2k+1).
inline double series_s2(int max_terms = 1000) {
    double sum = 0.0;
    for (int k = 0; k < max_terms; ++k) {
        const double a = (2 * k + 1) * std::numbers::pi;
        const double term = 2.0 * std::exp(-a) / (-std::expm1(-2.0 * a)) / (2 * k + 1);
        sum += term;
        if (term < 1e-17) break;
    }
    return 2.0 * sum;
}

/// Closed-form limiting energy on a square of side `edge_length` with corner
/// truncation `eps` (only eps/edge_length enters).
inline double J_infty_closed(ThetaBoundary kind, double eps, double L2, double s_plus,
                             double edge_length = 1.0) {
    if (!(eps > 0.0 && eps < edge_length)) throw std::invalid_argument("eps out of range");
    const double sign = kind == ThetaBoundary::D ? -1.0 : 1.0;
    const double bracket = std::log(edge_length / eps) + std::log(2.0 / std::numbers::pi) +
                           series_s1() + sign * series_s2();
    return 2.0 * std::numbers::pi * s_plus * s_plus * (1.0 + L2 / 2.0) * bracket;
}

// ---------------------------------------------------------------------------
// Transition cost between the two bulk wells

enum class PathMetric { euclidean, q_norm };

struct GeodesicOptions {
    int segments = 400;
    int max_iter = 200000;
    double tol = 1e-10;        // on the gradient norm, relative to the straight-line energy
    int stall_window = 2000;   // stop when E drops by less than stall_tol * E over this many steps
    double stall_tol = 1e-10;
    PathMetric metric = PathMetric::euclidean;
};

struct GeodesicResult {
    double c1 = 0.0;           // sqrt of the optimal path energy
    double length = 0.0;       // sum of F^(1/2) |dq| along the optimized path
    double straight_line = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::array<double, 3>> path;
};

namespace detail {
inline std::array<double, 3> metric_weights(PathMetric m) {
    return m == PathMetric::q_norm ? std::array<double, 3>{2, 2, 6} : std::array<double, 3>{1, 1, 1};
}

inline double path_energy(const std::vector<std::array<double, 3>>& q, const Parameters& p,
                          const std::array<double, 3>& w, std::vector<std::array<double, 3>>* grad) {
    const int N = static_cast<int>(q.size()) - 1;
    const double fmin = p.min_bulk();
    double E = 0.0;
    if (grad) grad->assign(q.size(), {0, 0, 0});
    for (int k = 0; k < N; ++k) {
        std::array<double, 3> m, d;
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            m[c] = 0.5 * (q[k][c] + q[k + 1][c]);
            d[c] = q[k + 1][c] - q[k][c];
            d2 += w[c] * d[c] * d[c];
        }
        const double F = bulk_density(m[0], m[1], m[2], p) - fmin;
        E += F * d2;
        if (grad) {
            const BulkGradient gb = bulk_gradient(m[0], m[1], m[2], p);
            const double gf[3] = {gb.d1, gb.d2, gb.d3};
            for (int c = 0; c < 3; ++c) {
                const double a = 0.5 * gf[c] * d2;
                const double b = 2.0 * F * w[c] * d[c];
                (*grad)[k][c] += N * (a - b);
                (*grad)[k + 1][c] += N * (a + b);
            }
        }
    }
    return N * E;
}

inline double path_length(const std::vector<std::array<double, 3>>& q, const Parameters& p,
                          const std::array<double, 3>& w) {
    const double fmin = p.min_bulk();
    double L = 0.0;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) {
        double d2 = 0.0;
        std::array<double, 3> m;
        for (int c = 0; c < 3; ++c) {
            m[c] = 0.5 * (q[k][c] + q[k + 1][c]);
            d2 += w[c] * (q[k + 1][c] - q[k][c]) * (q[k + 1][c] - q[k][c]);
        }
        L += std::sqrt(std::max(0.0, bulk_density(m[0], m[1], m[2], p) - fmin) * d2);
    }
    return L;
}
}  // namespace detail

/// Minimizes the discrete path energy N sum F(midpoint)|dq|^2 between two
/// points with fixed ends (gradient descent, Barzilai-Borwein step with
/// backtracking). At the optimum the path has constant speed and sqrt(E) is
/// the geodesic distance.
inline GeodesicResult geodesic_distance(const std::array<double, 3>& from,
                                        const std::array<double, 3>& to, const Parameters& p,
                                        const GeodesicOptions& opt = {}) {
    if (opt.segments < 2) throw std::invalid_argument("need at least two segments");
    const int N = opt.segments;
    const auto w = detail::metric_weights(opt.metric);
    std::vector<std::array<double, 3>> q(N + 1);
    for (int k = 0; k <= N; ++k)
        for (int c = 0; c < 3; ++c) q[k][c] = from[c] + (to[c] - from[c]) * k / double(N);

    GeodesicResult res;
    std::vector<std::array<double, 3>> grad, grad_prev, trial;
    double E = detail::path_energy(q, p, w, &grad);
    res.straight_line = std::sqrt(std::max(E, 0.0));
    const double E0 = E;
    double step = 1e-6;
    double E_mark = E;
    std::vector<std::array<double, 3>> q_prev = q;
    for (int it = 0; it < opt.max_iter; ++it) {
        double gnorm2 = 0.0;
        for (int k = 1; k < N; ++k)
            for (int c = 0; c < 3; ++c) gnorm2 += grad[k][c] * grad[k][c];
        if (std::sqrt(gnorm2) <= opt.tol * std::max(1.0, E0)) {
            res.converged = true;
            res.iterations = it;
            break;
        }
        if (it > 0) {
            double sy = 0.0, yy = 0.0;
            for (int k = 1; k < N; ++k)
                for (int c = 0; c < 3; ++c) {
                    const double s = q[k][c] - q_prev[k][c];
                    const double y = grad[k][c] - grad_prev[k][c];
                    sy += s * y;
                    yy += y * y;
                }
            if (sy > 0 && yy > 0) step = sy / yy;
        }
        double t = step;
        double E_new = E;
        std::vector<std::array<double, 3>> g_new;
        for (int bt = 0; bt < 60; ++bt) {
            trial = q;
            for (int k = 1; k < N; ++k)
                for (int c = 0; c < 3; ++c) trial[k][c] -= t * grad[k][c];
            E_new = detail::path_energy(trial, p, w, &g_new);
            if (E_new <= E - 1e-4 * t * gnorm2 || (bt > 0 && E_new < E)) break;
            t *= 0.5;
        }
        if (!(E_new <= E)) {
            res.iterations = it;
            break;
        }
        q_prev = q;
        grad_prev = grad;
        q = trial;
        grad = g_new;
        E = E_new;
        res.iterations = it + 1;
        if (it % opt.stall_window == 0) {
            if (it > 0 && E_mark - E <= opt.stall_tol * E) {
                res.converged = true;
                break;
            }
            E_mark = E;
        }
    }
    res.c1 = std::sqrt(std::max(E, 0.0));
    res.length = detail::path_length(q, p, w);
    res.path = std::move(q);
    return res;
}

/// Geodesic distance from (s/2, 0, -s/6) on the first well to (0, 0, s/3).
inline GeodesicResult transition_cost(const Parameters& p, const GeodesicOptions& opt = {}) {
    const double s = p.s_plus;
    return geodesic_distance({s / 2, 0, -s / 6}, {0, 0, s / 3}, p, opt);
}

/// Limiting energy of the Constant state: four boundary transition layers.
inline double G_infty_constant(double c1) { return 4.0 * c1; }

/// Anisotropy above which the Constant limit has lower energy than D.
inline double critical_L2(double eps, double c1, double s_plus, double edge_length = 1.0) {
    if (!(eps > 0.0 && eps < edge_length)) throw std::invalid_argument("eps out of range");
    const double bracket = std::log(edge_length / eps) + std::log(2.0 / std::numbers::pi) +
                           series_s1() - series_s2();
    return 4.0 * c1 / (s_plus * s_plus * std::numbers::pi * bracket) - 2.0;
}

}  // namespace ldg
