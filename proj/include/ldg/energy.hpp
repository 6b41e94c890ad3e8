#pragma once

#include <cmath>
#include <cstdlib>

#include "ldg/grid.hpp"
#include "ldg/parameters.hpp"
#include "ldg/state.hpp"

namespace ldg {

/// f_b(q1, q2, q3) = A S + C S^2 + 2 B q3 (q1^2 + q2^2 - q3^2), S = q1^2 + q2^2 + 3 q3^2.
inline double bulk_density(double q1, double q2, double q3, const Parameters& p) {
    const double in_plane = q1 * q1 + q2 * q2;
    const double S = in_plane + 3.0 * q3 * q3;
    return p.A * S + p.C * S * S + 2.0 * p.B * q3 * (in_plane - q3 * q3);
}

/// Partial derivatives of f_b.
struct BulkGradient {
    double d1, d2, d3;
};

inline BulkGradient bulk_gradient(double q1, double q2, double q3, const Parameters& p) {
    const double S = q1 * q1 + q2 * q2 + 3.0 * q3 * q3;
    const double common = 2.0 * (p.A + 2.0 * p.C * S + 2.0 * p.B * q3);
    return {common * q1, common * q2,
            6.0 * q3 * (p.A + 2.0 * p.C * S - p.B * q3) + 2.0 * p.B * (q1 * q1 + q2 * q2)};
}

/// Second derivatives of f_b, row-major symmetric 3x3.
inline std::array<double, 9> bulk_hessian(double q1, double q2, double q3, const Parameters& p) {
    const double S = q1 * q1 + q2 * q2 + 3.0 * q3 * q3;
    const double a = 2.0 * (p.A + 2.0 * p.C * S + 2.0 * p.B * q3);
    const double h11 = a + 8.0 * p.C * q1 * q1;
    const double h22 = a + 8.0 * p.C * q2 * q2;
    const double h12 = 8.0 * p.C * q1 * q2;
    const double h13 = q1 * (24.0 * p.C * q3 + 4.0 * p.B);
    const double h23 = q2 * (24.0 * p.C * q3 + 4.0 * p.B);
    const double h33 = 6.0 * (p.A + 2.0 * p.C * S - p.B * q3) + 6.0 * q3 * (12.0 * p.C * q3 - p.B);
    return {h11, h12, h13, h12, h22, h23, h13, h23, h33};
}

/// First derivatives of (q1, q2, q3) at a point.
struct Gradients {
    double q1x = 0, q1y = 0, q2x = 0, q2y = 0, q3x = 0, q3y = 0;
};

enum class ElasticForm { cross, sos_pos, sos_neg };

/// Elastic density in one of its three algebraic forms. `cross` is valid for
/// every L2; sos_pos is meant for L2 >= 0 and sos_neg for -1 < L2 < 0, where each
/// agrees pointwise with `cross`.
inline double elastic_density(const Gradients& d, const Parameters& p,
                              ElasticForm form = ElasticForm::cross) {
    const double L2 = p.L2;
    const double g1 = d.q1x * d.q1x + d.q1y * d.q1y;
    const double g2 = d.q2x * d.q2x + d.q2y * d.q2y;
    const double g3 = d.q3x * d.q3x + d.q3y * d.q3y;
    switch (form) {
        case ElasticForm::cross:
            return (1.0 + 0.5 * L2) * (g1 + g2) + (3.0 + 0.5 * L2) * g3 +
                   L2 * (d.q1y * d.q3y - d.q1x * d.q3x - d.q2y * d.q3x - d.q2x * d.q3y) +
                   std::abs(L2) * (d.q2y * d.q1x - d.q1y * d.q2x);
        case ElasticForm::sos_pos: {
            const double u = d.q1x + d.q2y - d.q3x;
            const double v = d.q2x - d.q1y - d.q3y;
            return g1 + g2 + 3.0 * g3 + 0.5 * L2 * (u * u + v * v);
        }
        case ElasticForm::sos_neg: {
            const double u = -d.q3x - d.q1x - d.q2y;
            const double v = d.q2x - d.q1y + d.q3y;
            return (1.0 + L2) * (g1 + g2 + 3.0 * g3) - 0.5 * L2 * (u * u + v * v + 4.0 * g3);
        }
    }
    return 0.0;
}

/// (q1,x + q2,y - q3,x)^2 + (q2,x - q1,y - q3,y)^2.
inline double f_div_density(const Gradients& d) {
    const double u = d.q1x + d.q2y - d.q3x;
    const double v = d.q2x - d.q1y - d.q3y;
    return u * u + v * v;
}

namespace detail {
// Second-order derivative along one grid direction: centred inside, one-sided
// three-point at the ends.
inline double diff(const ScalarField& f, int i, int j, int di, int dj, int n, double h) {
    const int k = di ? i : j;
    auto at = [&](int s) { return di ? f(i + s, j) : f(i, j + s); };
    if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (k == n - 1) return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
    return (at(1) - at(-1)) / (2.0 * h);
}

inline double cell_dx(const ScalarField& f, int i, int j, double h) {
    return (f(i + 1, j) - f(i, j) + f(i + 1, j + 1) - f(i, j + 1)) / (2.0 * h);
}
inline double cell_dy(const ScalarField& f, int i, int j, double h) {
    return (f(i, j + 1) - f(i, j) + f(i + 1, j + 1) - f(i + 1, j)) / (2.0 * h);
}
inline double cell_mean(const ScalarField& f, int i, int j) {
    return 0.25 * (f(i, j) + f(i + 1, j) + f(i, j + 1) + f(i + 1, j + 1));
}
}  // namespace detail

/// Nodal gradients: centred differences inside, second-order one-sided on the boundary.
inline Gradients node_gradients(const Grid& g, const State& s, int i, int j) {
    const int n = g.n();
    const double h = g.h();
    return {detail::diff(s.q1, i, j, 1, 0, n, h), detail::diff(s.q1, i, j, 0, 1, n, h),
            detail::diff(s.q2, i, j, 1, 0, n, h), detail::diff(s.q2, i, j, 0, 1, n, h),
            detail::diff(s.q3, i, j, 1, 0, n, h), detail::diff(s.q3, i, j, 0, 1, n, h)};
}

/// Cell-averaged gradients of the cell with lower-left node (i, j).
inline Gradients cell_gradients(const Grid& g, const State& s, int i, int j) {
    const double h = g.h();
    return {detail::cell_dx(s.q1, i, j, h), detail::cell_dy(s.q1, i, j, h),
            detail::cell_dx(s.q2, i, j, h), detail::cell_dy(s.q2, i, j, h),
            detail::cell_dx(s.q3, i, j, h), detail::cell_dy(s.q3, i, j, h)};
}

/// Trapezoidal integral of an elastic density form with nodal gradients.
inline double elastic_integral(const Grid& g, const State& s, const Parameters& p,
                               ElasticForm form = ElasticForm::cross) {
    double sum = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
            sum += g.trapezoid_weight(i, j) * elastic_density(node_gradients(g, s, i, j), p, form);
    return sum * g.h() * g.h();
}

/// Integral of f_div over cells; `interior_only` skips cells touching the boundary.
inline double f_div_integral(const Grid& g, const State& s, bool interior_only = false) {
    double sum = 0.0;
    const int lo = interior_only ? 1 : 0;
    const int hi = interior_only ? g.n() - 2 : g.n() - 1;
    for (int j = lo; j < hi; ++j)
        for (int i = lo; i < hi; ++i) sum += f_div_density(cell_gradients(g, s, i, j));
    return sum * g.h() * g.h();
}

struct EnergyBreakdown {
    double elastic = 0.0;
    double bulk = 0.0;
    double total = 0.0;
    double shifted = 0.0;
    double f_div = 0.0;
};

/// Discrete reduced energy.
///
/// Squared first differences live on grid edges (half weight along the
/// boundary), the mixed products on cells using cell-averaged differences,
/// and the bulk term uses the trapezoidal rule. This is the functional whose
/// exact gradient is -h^2 W r with W = diag(2, 2, 6) and r the residual.
inline EnergyBreakdown total_energy(const Grid& g, const State& s, const Parameters& p) {
    const int n = g.n();
    const double h = g.h();
    const double L2 = p.L2;
    const double a12 = 1.0 + 0.5 * L2;
    const double a3 = 3.0 + 0.5 * L2;

    double el = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double d1 = (s.q1(i + 1, j) - s.q1(i, j)) / h;
            const double d2 = (s.q2(i + 1, j) - s.q2(i, j)) / h;
            const double d3 = (s.q3(i + 1, j) - s.q3(i, j)) / h;
            el += w * (a12 * (d1 * d1 + d2 * d2) + a3 * d3 * d3 - L2 * d1 * d3);
        }
    }
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        for (int j = 0; j + 1 < n; ++j) {
            const double d1 = (s.q1(i, j + 1) - s.q1(i, j)) / h;
            const double d2 = (s.q2(i, j + 1) - s.q2(i, j)) / h;
            const double d3 = (s.q3(i, j + 1) - s.q3(i, j)) / h;
            el += w * (a12 * (d1 * d1 + d2 * d2) + a3 * d3 * d3 + L2 * d1 * d3);
        }
    }
    double fdiv = 0.0;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            const Gradients c = cell_gradients(g, s, i, j);
            el += -L2 * (c.q2y * c.q3x + c.q2x * c.q3y) +
                  std::abs(L2) * (c.q2y * c.q1x - c.q1y * c.q2x);
            fdiv += f_div_density(c);
        }

    double bulk = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            bulk += g.trapezoid_weight(i, j) * bulk_density(s.q1(i, j), s.q2(i, j), s.q3(i, j), p);

    EnergyBreakdown e;
    e.elastic = el * h * h;
    e.bulk = bulk * h * h * p.bulk_weight();
    e.total = e.elastic + e.bulk;
    e.shifted = e.total - 4.0 * p.min_bulk() * p.bulk_weight();
    e.f_div = fdiv * h * h;
    return e;
}

/// Midpoint-rule energy: cell-centre values and cell-averaged gradients.
/// Independent of total_energy's quadrature; agrees with it to O(h^2).
inline EnergyBreakdown midpoint_energy(const Grid& g, const State& s, const Parameters& p) {
    const int n = g.n();
    const double h = g.h();
    double el = 0.0, bulk = 0.0, fdiv = 0.0;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            const Gradients c = cell_gradients(g, s, i, j);
            el += elastic_density(c, p, ElasticForm::cross);
            fdiv += f_div_density(c);
            bulk += bulk_density(detail::cell_mean(s.q1, i, j), detail::cell_mean(s.q2, i, j),
                                 detail::cell_mean(s.q3, i, j), p);
        }
    EnergyBreakdown e;
    e.elastic = el * h * h;
    e.bulk = bulk * h * h * p.bulk_weight();
    e.total = e.elastic + e.bulk;
    e.shifted = e.total - 4.0 * p.min_bulk() * p.bulk_weight();
    e.f_div = fdiv * h * h;
    return e;
}

/// (m1, m2) = (integral of q1 (1+x+y), integral of q2 (1+x+y)).
struct Measures {
    double m1 = 0.0;
    double m2 = 0.0;
};

inline Measures measures(const Grid& g, const State& s) {
    Measures m;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const double w = g.trapezoid_weight(i, j) * (1.0 + g.x(i) + g.y(j));
            m.m1 += w * s.q1(i, j);
            m.m2 += w * s.q2(i, j);
        }
    m.m1 *= g.h() * g.h();
    m.m2 *= g.h() * g.h();
    return m;
}

}  // namespace ldg
