#pragma once

#include <Eigen/Sparse>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldg/energy.hpp"
#include "ldg/grid.hpp"
#include "ldg/parameters.hpp"
#include "ldg/state.hpp"

namespace ldg {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// 3x3 finite-difference stencil, c[dj+1][di+1] multiplies f(i+di, j+dj).
struct Stencil {
    std::array<std::array<double, 3>, 3> c{};

    Stencil& operator+=(const Stencil& o) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) c[a][b] += o.c[a][b];
        return *this;
    }
    friend Stencil operator*(double s, Stencil st) {
        for (auto& row : st.c)
            for (double& v : row) v *= s;
        return st;
    }
    [[nodiscard]] double apply(const ScalarField& f, int i, int j) const {
        double v = 0.0;
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const double w = c[dj + 1][di + 1];
                if (w != 0.0) v += w * f(i + di, j + dj);
            }
        return v;
    }
};

namespace stencils {
inline Stencil laplacian(double h) {
    const double s = 1.0 / (h * h);
    Stencil st;
    st.c = {{{0, s, 0}, {s, -4 * s, s}, {0, s, 0}}};
    return st;
}
inline Stencil dxx(double h) {
    const double s = 1.0 / (h * h);
    Stencil st;
    st.c = {{{0, 0, 0}, {s, -2 * s, s}, {0, 0, 0}}};
    return st;
}
inline Stencil dyy(double h) {
    const double s = 1.0 / (h * h);
    Stencil st;
    st.c = {{{0, s, 0}, {0, -2 * s, 0}, {0, s, 0}}};
    return st;
}
/// d_yy - d_xx; the centre weights cancel.
inline Stencil yy_minus_xx(double h) {
    const double s = 1.0 / (h * h);
    Stencil st;
    st.c = {{{0, s, 0}, {-s, 0, -s}, {0, s, 0}}};
    return st;
}
/// Four-point cross stencil for the mixed derivative.
inline Stencil dxy(double h) {
    const double s = 1.0 / (4.0 * h * h);
    Stencil st;
    st.c = {{{s, 0, -s}, {0, 0, 0}, {-s, 0, s}}};
    return st;
}
}  // namespace stencils

/// Unknown ordering: component-major, then interior nodes row-major.
inline std::size_t unknown_index(const Grid& g, int comp, int i, int j) {
    return static_cast<std::size_t>(comp) * g.interior_size() + g.interior_index(i, j);
}

inline Vector pack_interior(const Grid& g, const State& s) {
    Vector x(3 * g.interior_size());
    for (int c = 0; c < 3; ++c)
        for (int j = 1; j < g.n() - 1; ++j)
            for (int i = 1; i < g.n() - 1; ++i) x[unknown_index(g, c, i, j)] = s.field(c)(i, j);
    return x;
}

inline void unpack_interior(const Grid& g, const Vector& x, State& s) {
    for (int c = 0; c < 3; ++c)
        for (int j = 1; j < g.n() - 1; ++j)
            for (int i = 1; i < g.n() - 1; ++i) s.field(c)(i, j) = x[unknown_index(g, c, i, j)];
}

inline Vector pack_interior(const Grid& g, const ScalarField& f) {
    Vector x(g.interior_size());
    for (int j = 1; j < g.n() - 1; ++j)
        for (int i = 1; i < g.n() - 1; ++i) x[g.interior_index(i, j)] = f(i, j);
    return x;
}

inline void unpack_interior(const Grid& g, const Vector& x, ScalarField& f) {
    for (int j = 1; j < g.n() - 1; ++j)
        for (int i = 1; i < g.n() - 1; ++i) f(i, j) = x[g.interior_index(i, j)];
}

/// Component weights (2, 2, 6) repeated over the interior nodes.
inline Vector component_weights(const Grid& g) {
    const auto m = static_cast<Eigen::Index>(g.interior_size());
    Vector w(3 * m);
    w.segment(0, m).setConstant(2.0);
    w.segment(m, m).setConstant(2.0);
    w.segment(2 * m, m).setConstant(6.0);
    return w;
}

namespace detail {
// Adds stencil entries of row `row` acting on component block `col_comp`,
// dropping boundary neighbours (their values live in the residual).
inline void add_stencil(std::vector<Triplet>& t, const Grid& g, std::size_t row, int col_comp,
                        std::size_t block, int i, int j, const Stencil& st) {
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            const double w = st.c[dj + 1][di + 1];
            if (w == 0.0 || g.is_boundary(i + di, j + dj)) continue;
            t.emplace_back(static_cast<int>(row),
                           static_cast<int>(col_comp * block + g.interior_index(i + di, j + dj)),
                           w);
        }
}

struct CoupledStencils {
    // op[a][b]: linear operator of equation a acting on component b.
    std::array<std::array<Stencil, 3>, 3> op{};
};

inline CoupledStencils coupled_stencils(double h, double L2) {
    CoupledStencils s;
    const Stencil lap = stencils::laplacian(h);
    const Stencil ym = stencils::yy_minus_xx(h);
    const Stencil xy = stencils::dxy(h);
    s.op[0][0] = (1.0 + 0.5 * L2) * lap;
    s.op[0][2] = (0.5 * L2) * ym;
    s.op[1][1] = (1.0 + 0.5 * L2) * lap;
    s.op[1][2] = (-L2) * xy;
    s.op[2][2] = (1.0 + L2 / 6.0) * lap;
    s.op[2][0] = (L2 / 6.0) * ym;
    s.op[2][1] = (-L2 / 3.0) * xy;
    return s;
}

inline constexpr std::array<double, 3> kWeights = {2.0, 2.0, 6.0};
}  // namespace detail

/// Residual (LHS - RHS) of the reduced Euler-Lagrange system at interior nodes.
///
/// Row order matches unknown_index. With kappa = lambda_bar_sq/(2C), the right
/// sides are kappa/w_c * d f_b/d q_c for weights w = (2, 2, 6).
inline Vector assemble_residual(const Grid& g, const State& s, const Parameters& p) {
    const auto st = detail::coupled_stencils(g.h(), p.L2);
    const double kappa = p.bulk_weight();
    Vector r(3 * g.interior_size());
    for (int j = 1; j < g.n() - 1; ++j)
        for (int i = 1; i < g.n() - 1; ++i) {
            const BulkGradient bg = bulk_gradient(s.q1(i, j), s.q2(i, j), s.q3(i, j), p);
            const std::array<double, 3> rhs = {kappa * bg.d1 / 2.0, kappa * bg.d2 / 2.0,
                                               kappa * bg.d3 / 6.0};
            for (int a = 0; a < 3; ++a) {
                double v = -rhs[a];
                for (int b = 0; b < 3; ++b) v += st.op[a][b].apply(s.field(b), i, j);
                r[unknown_index(g, a, i, j)] = v;
            }
        }
    return r;
}

/// Analytic Jacobian d residual / d interior unknowns.
inline SparseMatrix assemble_jacobian(const Grid& g, const State& s, const Parameters& p) {
    const auto st = detail::coupled_stencils(g.h(), p.L2);
    const double kappa = p.bulk_weight();
    const std::size_t m = g.interior_size();
    std::vector<Triplet> t;
    t.reserve(37 * m);
    for (int j = 1; j < g.n() - 1; ++j)
        for (int i = 1; i < g.n() - 1; ++i) {
            const auto hb = bulk_hessian(s.q1(i, j), s.q2(i, j), s.q3(i, j), p);
            for (int a = 0; a < 3; ++a) {
                const std::size_t row = unknown_index(g, a, i, j);
                for (int b = 0; b < 3; ++b) {
                    Stencil op = st.op[a][b];
                    op.c[1][1] -= kappa * hb[3 * a + b] / detail::kWeights[a];
                    detail::add_stencil(t, g, row, b, m, i, j, op);
                }
            }
        }
    SparseMatrix J(3 * m, 3 * m);
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
    return J;
}

/// Auxiliary scalar problems: Allen-Cahn, first- and second-order corrections,
/// and the linear Laplace/Poisson problems of the small-L2 and large-lambda limits.
enum class ScalarPdeKind {
    allen_cahn,
    first_order_f,
    first_order_g,
    first_order_h,
    second_order_phi,
    second_order_gamma,
    second_order_mu,
    laplace_q0,
    poisson_h0,
    laplace_theta,
};

inline std::string to_string(ScalarPdeKind k) {
    switch (k) {
        case ScalarPdeKind::allen_cahn: return "allen_cahn";
        case ScalarPdeKind::first_order_f: return "first_order_f";
        case ScalarPdeKind::first_order_g: return "first_order_g";
        case ScalarPdeKind::first_order_h: return "first_order_h";
        case ScalarPdeKind::second_order_phi: return "second_order_phi";
        case ScalarPdeKind::second_order_gamma: return "second_order_gamma";
        case ScalarPdeKind::second_order_mu: return "second_order_mu";
        case ScalarPdeKind::laplace_q0: return "laplace_q0";
        case ScalarPdeKind::poisson_h0: return "poisson_h0";
        case ScalarPdeKind::laplace_theta: return "laplace_theta";
    }
    return "?";
}

/// Unknown field (boundary nodes hold the Dirichlet data) plus the
/// previously computed fields a kind depends on.
struct ScalarPdeData {
    ScalarField u;
    std::optional<ScalarField> q, f, g, h;
};

struct ScalarSystem {
    Vector residual;
    SparseMatrix jacobian;
};

class MissingDependency : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {
inline const ScalarField& need(const std::optional<ScalarField>& f, const char* name,
                               ScalarPdeKind k) {
    if (!f) throw MissingDependency(to_string(k) + " needs field " + name);
    return *f;
}
}  // namespace detail

/// Residual Delta u - RHS and its Jacobian at the interior nodes. With
/// lambda^2/L = lambda_bar_sq/(2C) the factor 2C lambda^2/L is lambda_bar_sq.
inline ScalarSystem assemble_scalar_pde(ScalarPdeKind kind, const Grid& grid,
                                        const ScalarPdeData& data, const Parameters& p) {
    using K = ScalarPdeKind;
    const double h = grid.h();
    const double lam = p.lambda_bar_sq;
    const double b2 = p.B * p.B / (4.0 * p.C * p.C);
    const Stencil lap = stencils::laplacian(h);
    const Stencil ym = stencils::yy_minus_xx(h);
    const Stencil xy = stencils::dxy(h);

    const ScalarField* q = nullptr;
    const ScalarField* f = nullptr;
    const ScalarField* g = nullptr;
    const ScalarField* hh = nullptr;
    switch (kind) {
        case K::first_order_f:
        case K::first_order_g:
        case K::first_order_h:
        case K::poisson_h0: q = &detail::need(data.q, "q", kind); break;
        case K::second_order_phi:
        case K::second_order_gamma:
        case K::second_order_mu:
            q = &detail::need(data.q, "q", kind);
            f = &detail::need(data.f, "f", kind);
            g = &detail::need(data.g, "g", kind);
            hh = &detail::need(data.h, "h", kind);
            break;
        default: break;
    }
    if (data.u.n != grid.n()) throw std::invalid_argument("unknown field does not match grid");

    const std::size_t m = grid.interior_size();
    ScalarSystem sys;
    sys.residual.resize(static_cast<Eigen::Index>(m));
    std::vector<Triplet> t;
    t.reserve(5 * m);
    for (int j = 1; j < grid.n() - 1; ++j)
        for (int i = 1; i < grid.n() - 1; ++i) {
            const double u = data.u(i, j);
            double rhs = 0.0;    // right-hand side value
            double drhs = 0.0;   // d rhs / d u
            double source = 0.0; // derivative terms of known fields moved to the left
            switch (kind) {
                case K::allen_cahn:
                    rhs = lam * u * (u * u - b2);
                    drhs = lam * (3.0 * u * u - b2);
                    break;
                case K::first_order_f: {
                    const double qv = (*q)(i, j);
                    const double w = qv * qv - b2;
                    rhs = 0.5 * lam * (4.0 * qv * qv * u + (2.0 * u - qv) * w);
                    drhs = 0.5 * lam * (4.0 * qv * qv + 2.0 * w);
                    break;
                }
                case K::first_order_g: {
                    const double qv = (*q)(i, j);
                    rhs = lam * u * (qv * qv - b2);
                    drhs = lam * (qv * qv - b2);
                    break;
                }
                case K::first_order_h: {
                    const double qv = (*q)(i, j);
                    rhs = lam * u * (qv * qv + b2) - ym.apply(*q, i, j) / 6.0;
                    drhs = lam * (qv * qv + b2);
                    break;
                }
                case K::second_order_phi: {
                    const double qv = (*q)(i, j), fv = (*f)(i, j), gv = (*g)(i, j),
                                 hv = (*hh)(i, j);
                    const double w = qv * qv - b2;
                    source = 0.5 * ym.apply(*hh, i, j);
                    rhs = lam * (qv * qv * (2.0 * u - fv) +
                                 qv * (3.0 * fv * fv + gv * gv + 3.0 * hv * hv) -
                                 0.25 * (2.0 * fv - qv - 4.0 * u) * w);
                    drhs = lam * (2.0 * qv * qv + w);
                    break;
                }
                case K::second_order_gamma: {
                    const double qv = (*q)(i, j), fv = (*f)(i, j), gv = (*g)(i, j);
                    const double w = qv * qv - b2;
                    source = -xy.apply(*hh, i, j);
                    rhs = lam * (2.0 * qv * fv * gv + (u - 0.5 * gv) * w);
                    drhs = lam * w;
                    break;
                }
                case K::second_order_mu: {
                    const double qv = (*q)(i, j), fv = (*f)(i, j), hv = (*hh)(i, j);
                    const double w = qv * qv + b2;
                    source = ym.apply(*f, i, j) / 6.0 - xy.apply(*g, i, j) / 3.0;
                    rhs = lam * (2.0 * hv * (qv * fv - (p.B / p.C) * hv) + (u - hv / 6.0) * w) +
                          ym.apply(*q, i, j) / 36.0;
                    drhs = lam * w;
                    break;
                }
                case K::laplace_q0:
                case K::laplace_theta: break;
                case K::poisson_h0: rhs = -ym.apply(*q, i, j) / 6.0; break;
            }
            const std::size_t row = grid.interior_index(i, j);
            sys.residual[static_cast<Eigen::Index>(row)] = lap.apply(data.u, i, j) + source - rhs;
            Stencil op = lap;
            op.c[1][1] -= drhs;
            detail::add_stencil(t, grid, row, 0, m, i, j, op);
        }
    sys.jacobian.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    sys.jacobian.setFromTriplets(t.begin(), t.end());
    sys.jacobian.makeCompressed();
    return sys;
}

/// Linear map from the eighth-domain unknowns to the full interior vector.
///
/// Reduced unknowns: q1 at wedge nodes off the diagonal, q2 at wedge nodes off
/// the axis y = 0, q3 at every wedge node (wedge = interior nodes with
/// 0 <= y <= x). Columns of P carry the reflection signs.
struct SymmetricReduction {
    SparseMatrix P;
    std::vector<std::array<int, 3>> reduced_nodes;  // (comp, i, j) per reduced unknown

    [[nodiscard]] Eigen::Index size() const { return P.cols(); }
};

inline SymmetricReduction make_symmetric_reduction(const Grid& g) {
    SymmetricReduction red;
    const int c = g.centre();
    std::vector<std::vector<int>> col(3, std::vector<int>(g.size(), -1));
    for (int comp = 0; comp < 3; ++comp)
        for (int j = c; j < g.n() - 1; ++j)
            for (int i = j; i < g.n() - 1; ++i) {
                if (i == c && j == c && comp != 2) continue;  // centre lies on both lines
                if (comp == 0 && i - c == j - c) continue;
                if (comp == 1 && j == c) continue;
                col[comp][g.index(i, j)] = static_cast<int>(red.reduced_nodes.size());
                red.reduced_nodes.push_back({comp, i, j});
            }
    std::vector<Triplet> t;
    for (int comp = 0; comp < 3; ++comp)
        for (int j = 1; j < g.n() - 1; ++j)
            for (int i = 1; i < g.n() - 1; ++i) {
                const WedgeImage w = wedge_image(g, i, j);
                const int k = col[comp][g.index(w.i, w.j)];
                if (k < 0) continue;
                t.emplace_back(static_cast<int>(unknown_index(g, comp, i, j)), k, w.sign[comp]);
            }
    red.P.resize(static_cast<Eigen::Index>(3 * g.interior_size()),
                 static_cast<Eigen::Index>(red.reduced_nodes.size()));
    red.P.setFromTriplets(t.begin(), t.end());
    red.P.makeCompressed();
    return red;
}

}  // namespace ldg
