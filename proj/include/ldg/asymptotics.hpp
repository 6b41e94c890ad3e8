#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "ldg/grid.hpp"
#include "ldg/newton.hpp"
#include "ldg/parameters.hpp"
#include "ldg/residual.hpp"
#include "ldg/state.hpp"

namespace ldg {

inline constexpr int kDefaultSeriesTerms = 199;

namespace detail {
// sinh(a u) / sinh(2 a) for a > 0, 0 <= u <= 2, without overflow.
inline double sinh_ratio(double a, double u) {
    return std::exp(a * (u - 2.0)) * (-std::expm1(-2.0 * a * u)) / (-std::expm1(-4.0 * a));
}
}  // namespace detail

/// Harmonic function on the square with the sharp tangent data (+s/2 on y = +-1,
/// -s/2 on x = +-1), summed over odd k <= n_terms.
inline double eval_q0(double x, double y, double s_plus, int n_terms = kDefaultSeriesTerms) {
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= n_terms; k += 2) {
        const double a = k * pi / 2.0;
        const double ty = detail::sinh_ratio(a, 1.0 - y) + detail::sinh_ratio(a, 1.0 + y);
        const double tx = detail::sinh_ratio(a, 1.0 - x) + detail::sinh_ratio(a, 1.0 + x);
        sum += 4.0 / (k * pi) * (std::sin(a * (x + 1.0)) * ty - std::sin(a * (y + 1.0)) * tx);
    }
    return 0.5 * s_plus * sum;
}

/// Solution of Delta h0 = -(q0,yy - q0,xx)/6 with h0 = 0 on the boundary.
///
/// The double sine series over odd (m, n) with coefficients
/// 16 s m n / (3 pi^2 (m^2 + n^2)^2) is summed in closed form over n:
/// each m contributes sin(a (x+1)) (s/3) [cosh(a y) tanh(a) - y sinh(a y)] / cosh(a), a = m pi/2.
inline double eval_h0(double x, double y, double s_plus, int n_terms = kDefaultSeriesTerms) {
    const double pi = std::numbers::pi;
    const double ay = std::abs(y);
    const double sy = y < 0 ? -1.0 : 1.0;
    double sum = 0.0;
    for (int m = 1; m <= n_terms; m += 2) {
        const double a = m * pi / 2.0;
        const double e2a = std::exp(-2.0 * a);
        const double lead = std::exp(a * (ay - 1.0)) / (1.0 + e2a);
        const double e2y = std::exp(-2.0 * a * ay);
        const double cosh_ratio = lead * (1.0 + e2y);       // cosh(a y) / cosh(a)
        const double sinh_ratio = sy * lead * (1.0 - e2y);  // sinh(a y) / cosh(a)
        const double tanh_a = (1.0 - e2a) / (1.0 + e2a);
        sum += std::sin(a * (x + 1.0)) * (cosh_ratio * tanh_a - y * sinh_ratio);
    }
    return s_plus / 3.0 * sum;
}

/// The printed double series for h0, truncated to odd m, n <= n_terms.
inline double eval_h0_double_sum(double x, double y, double s_plus, int n_terms) {
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int m = 1; m <= n_terms; m += 2) {
        const double sm = std::sin(m * pi * (x + 1.0) / 2.0);
        for (int n = 1; n <= n_terms; n += 2) {
            const double d = static_cast<double>(m) * m + static_cast<double>(n) * n;
            sum += m * n / (d * d) * sm * std::sin(n * pi * (y + 1.0) / 2.0);
        }
    }
    return 16.0 * s_plus / (3.0 * pi * pi) * sum;
}

/// q (Allen-Cahn root), first-order corrections f, g, h and, once built,
/// second-order corrections phi, gamma, mu. All corrections vanish on the boundary.
struct AsymptoticBundle {
    Parameters params;
    ScalarField q, f, g, h;
    std::optional<ScalarField> phi, gamma, mu;
    SolveReport q_report;
    SolveReport second_order_report;
};

namespace detail {
inline void require_special_temperature(const Parameters& p) {
    if (!p.at_special_temperature(1e-9))
        throw ConfigError("asymptotic expansions assume A = -B^2/(3C)");
}

inline ScalarField boundary_lift(const Grid& g, const Parameters& p) {
    ScalarField u(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            if (g.is_boundary(i, j)) u(i, j) = boundary_value(Component::q1, g.x(i), g.y(j), p);
    return u;
}

inline ScalarField solve_linear_correction(ScalarPdeKind kind, const Grid& grid,
                                           ScalarPdeData data, const Parameters& p,
                                           SolveReport* report = nullptr) {
    data.u = ScalarField(grid);
    ScalarSolveResult r = solve_scalar_pde(kind, grid, data, p);
    if (report) *report = r.report;
    if (!r.report.converged && !report)
        throw std::runtime_error(to_string(kind) + ": " + r.report.message);
    return r.u;
}
}  // namespace detail

/// Discrete harmonic lift of the q1 boundary data.
inline ScalarField solve_q0(const Grid& g, const Parameters& p) {
    ScalarPdeData d{detail::boundary_lift(g, p), {}, {}, {}, {}};
    ScalarSolveResult r = solve_scalar_pde(ScalarPdeKind::laplace_q0, g, d, p);
    if (!r.report.converged) throw std::runtime_error("laplace_q0: " + r.report.message);
    return r.u;
}

/// Discrete solution of Delta h0 = -(q0,yy - q0,xx)/6 for a given q0 field.
inline ScalarField solve_h0(const Grid& g, const Parameters& p, const ScalarField& q0) {
    return detail::solve_linear_correction(ScalarPdeKind::poisson_h0, g,
                                           ScalarPdeData{ScalarField(g), q0, {}, {}, {}}, p);
}

/// Allen-Cahn root on the WORS-symmetric branch: Newton from the harmonic lift,
/// falling back to continuation in lambda_bar_sq from zero when that fails.
/// The returned report is that of the final solve.
inline ScalarSolveResult solve_allen_cahn(const Grid& g, const Parameters& p,
                                          const NewtonOptions& opt = {}) {
    const ScalarField lift = solve_q0(g, p);
    ScalarSolveResult r = solve_scalar_pde(ScalarPdeKind::allen_cahn, g,
                                           ScalarPdeData{lift, {}, {}, {}, {}}, p, opt);
    if (r.report.converged) return r;
    ScalarField u = lift;
    double lam = 0.0;
    double step = std::min(5.0, p.lambda_bar_sq);
    while (lam < p.lambda_bar_sq) {
        const double next = std::min(p.lambda_bar_sq, lam + step);
        ScalarSolveResult t = solve_scalar_pde(ScalarPdeKind::allen_cahn, g,
                                               ScalarPdeData{u, {}, {}, {}, {}},
                                               p.with_lambda_bar_sq(next), opt);
        if (t.report.converged) {
            u = t.u;
            lam = next;
            r = std::move(t);
            step *= 1.5;
        } else {
            step *= 0.5;
            if (step < 1e-3) return t;
        }
    }
    return r;
}

/// Solves the Allen-Cahn problem (WORS-symmetric root) and the three
/// linear first-order problems.
inline AsymptoticBundle build_first_order(const Grid& g, const Parameters& p,
                                          const NewtonOptions& opt = {}) {
    detail::require_special_temperature(p);
    AsymptoticBundle b;
    b.params = p;
    ScalarSolveResult ac = solve_allen_cahn(g, p, opt);
    b.q_report = ac.report;
    if (!ac.report.converged) throw std::runtime_error("allen_cahn: " + ac.report.message);
    b.q = ac.u;
    const ScalarPdeData dep{ScalarField(g), b.q, {}, {}, {}};
    b.f = detail::solve_linear_correction(ScalarPdeKind::first_order_f, g, dep, p);
    b.g = detail::solve_linear_correction(ScalarPdeKind::first_order_g, g, dep, p);
    b.h = detail::solve_linear_correction(ScalarPdeKind::first_order_h, g, dep, p);
    return b;
}

/// Adds phi, gamma, mu. A singular or failed linear solve is recorded in
/// second_order_report and leaves the fields unset.
inline void build_second_order(const Grid& g, AsymptoticBundle& b) {
    const Parameters& p = b.params;
    const ScalarPdeData dep{ScalarField(g), b.q, b.f, b.g, b.h};
    SolveReport rep;
    ScalarField phi = detail::solve_linear_correction(ScalarPdeKind::second_order_phi, g, dep, p, &rep);
    if (!rep.converged) {
        b.second_order_report = rep;
        return;
    }
    ScalarField gamma =
        detail::solve_linear_correction(ScalarPdeKind::second_order_gamma, g, dep, p, &rep);
    if (!rep.converged) {
        b.second_order_report = rep;
        return;
    }
    ScalarField mu = detail::solve_linear_correction(ScalarPdeKind::second_order_mu, g, dep, p, &rep);
    b.second_order_report = rep;
    if (!rep.converged) return;
    b.phi = std::move(phi);
    b.gamma = std::move(gamma);
    b.mu = std::move(mu);
}

/// (q + L2 f [+ L2^2 phi], L2 g [+ L2^2 gamma], -s/6 + L2 h [+ L2^2 mu]) with
/// the boundary data imposed exactly.
inline State composite_state(const Grid& g, const AsymptoticBundle& b, double L2, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
    if (order == 2 && !(b.phi && b.gamma && b.mu))
        throw std::invalid_argument("second-order fields are not available");
    const double s = b.params.s_plus;
    State out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.q1.values[k] = b.q.values[k] + L2 * b.f.values[k];
        out.q2.values[k] = L2 * b.g.values[k];
        out.q3.values[k] = -s / 6.0 + L2 * b.h.values[k];
        if (order == 2) {
            out.q1.values[k] += L2 * L2 * b.phi->values[k];
            out.q2.values[k] += L2 * L2 * b.gamma->values[k];
            out.q3.values[k] += L2 * L2 * b.mu->values[k];
        }
    }
    apply_boundary(g, b.params.with_L2(L2), out);
    return out;
}

/// Number of sign changes of a field along the diagonal x = y, ignoring values
/// below `tol` in magnitude.
inline int diagonal_sign_changes(const Grid& g, const ScalarField& f, double tol) {
    int changes = 0;
    int last = 0;
    for (int k = 1; k < g.n() - 1; ++k) {
        const double v = f(k, k);
        if (std::abs(v) <= tol) continue;
        const int sgn = v > 0 ? 1 : -1;
        if (last != 0 && sgn != last) ++changes;
        last = sgn;
    }
    return changes;
}

}  // namespace ldg
