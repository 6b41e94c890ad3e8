#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldg/linear.hpp"
#include "ldg/residual.hpp"
#include "ldg/state.hpp"

namespace ldg {

struct NewtonOptions {
    double tol_residual = 1e-10;  // sup-norm of the residual
    int max_iter = 50;
    int max_halvings = 12;

    void validate() const {
        if (!(tol_residual > 0.0)) throw ConfigError("newton.tol must be positive");
        if (max_iter < 1) throw ConfigError("newton.max_iter must be >= 1");
        if (max_halvings < 0) throw ConfigError("newton.max_halvings must be >= 0");
    }
};

struct SolveReport {
    bool converged = false;
    bool singular = false;  // linear solve broke down (typically at a bifurcation)
    int iterations = 0;
    std::vector<double> residual_history;  // sup-norm, starting with the initial guess
    double final_residual = std::numeric_limits<double>::infinity();
    std::string message;
};

namespace detail {

struct Evaluation {
    Vector F;       // system driven to zero
    double metric;  // convergence measure (sup-norm of the physical residual)
};

// Damped Newton on F(x) = 0: halve the step while the metric does not
// decrease, give up after max_halvings.
inline SolveReport newton_core(Vector& x, const std::function<Evaluation(const Vector&)>& eval,
                               const std::function<SparseMatrix(const Vector&)>& jacobian,
                               const NewtonOptions& opt) {
    opt.validate();
    SolveReport rep;
    Evaluation cur = eval(x);
    rep.residual_history.push_back(cur.metric);
    rep.final_residual = cur.metric;
    if (!std::isfinite(cur.metric)) {
        rep.message = "non-finite residual at initial guess";
        return rep;
    }
    while (true) {
        if (cur.metric <= opt.tol_residual) {
            rep.converged = true;
            rep.message = "converged";
            break;
        }
        if (rep.iterations >= opt.max_iter) {
            rep.message = "maximum iterations reached";
            break;
        }
        SparseLU lu;
        Vector dx;
        bool ok = lu.factor(jacobian(x));
        if (ok) {
            try {
                dx = lu.solve(cur.F);
            } catch (const SingularMatrixError&) {
                ok = false;
            }
        }
        if (!ok) {
            rep.singular = true;
            rep.message = "singular Jacobian";
            break;
        }
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k, t *= 0.5) {
            Vector trial = x - t * dx;
            Evaluation e = eval(trial);
            if (std::isfinite(e.metric) && e.metric < cur.metric) {
                x = std::move(trial);
                cur = std::move(e);
                accepted = true;
                break;
            }
        }
        ++rep.iterations;
        if (!accepted) {
            rep.message = "line search failed";
            break;
        }
        rep.residual_history.push_back(cur.metric);
        rep.final_residual = cur.metric;
    }
    return rep;
}

inline void require_boundary(const Grid& g, const Parameters& p, const State& s) {
    if (s.n() != g.n()) throw std::invalid_argument("state does not match grid");
    if (boundary_mismatch(g, p, s) > 1e-12 * std::max(1.0, p.s_plus))
        throw std::invalid_argument("initial state does not carry the boundary data");
}

}  // namespace detail

struct NewtonResult {
    State state;
    SolveReport report;
};

/// Newton on the full coupled system. Returns the last accepted iterate.
inline NewtonResult newton_solve(const Grid& g, const State& initial, const Parameters& p,
                                 const NewtonOptions& opt = {}) {
    detail::require_boundary(g, p, initial);
    State work = initial;
    Vector x = pack_interior(g, initial);
    auto eval = [&](const Vector& v) {
        unpack_interior(g, v, work);
        Vector r = assemble_residual(g, work, p);
        const double m = r.lpNorm<Eigen::Infinity>();
        return detail::Evaluation{std::move(r), m};
    };
    auto jac = [&](const Vector& v) {
        unpack_interior(g, v, work);
        return assemble_jacobian(g, work, p);
    };
    NewtonResult out;
    out.report = detail::newton_core(x, eval, jac, opt);
    out.state = initial;
    unpack_interior(g, x, out.state);
    return out;
}

/// Reduced unknowns of a state (its wedge values).
inline Vector restrict_to_wedge(const Grid& g, const SymmetricReduction& red, const State& s) {
    (void)g;
    Vector z(red.size());
    for (Eigen::Index k = 0; k < red.size(); ++k) {
        const auto& [c, i, j] = red.reduced_nodes[static_cast<std::size_t>(k)];
        z[k] = s.field(c)(i, j);
    }
    return z;
}

/// Newton restricted to the symmetric subspace: solves P^T W r(P z) = 0 on the
/// eighth domain and reflects. The initial guess is replaced by the
/// reflection of its wedge values. Convergence is measured on the full residual.
inline NewtonResult newton_solve_symmetric(const Grid& g, const State& initial,
                                           const Parameters& p, const NewtonOptions& opt = {},
                                           const SymmetricReduction* reduction = nullptr) {
    detail::require_boundary(g, p, initial);
    SymmetricReduction local;
    if (!reduction) {
        local = make_symmetric_reduction(g);
        reduction = &local;
    }
    const SymmetricReduction& red = *reduction;
    const SparseMatrix& P = red.P;
    const SparseMatrix Pt = P.transpose();
    const Vector w = component_weights(g);

    State work = initial;
    Vector z = restrict_to_wedge(g, red, initial);
    auto eval = [&](const Vector& v) {
        unpack_interior(g, P * v, work);
        const Vector r = assemble_residual(g, work, p);
        Vector F = Pt * w.cwiseProduct(r);
        return detail::Evaluation{std::move(F), r.lpNorm<Eigen::Infinity>()};
    };
    auto jac = [&](const Vector& v) {
        unpack_interior(g, P * v, work);
        const SparseMatrix J = assemble_jacobian(g, work, p);
        SparseMatrix reduced = Pt * (w.asDiagonal() * J) * P;
        reduced.makeCompressed();
        return reduced;
    };
    NewtonResult out;
    out.report = detail::newton_core(z, eval, jac, opt);
    out.state = initial;
    unpack_interior(g, P * z, out.state);
    return out;
}

struct ScalarSolveResult {
    ScalarField u;
    SolveReport report;
};

/// Newton (one step for the linear kinds) on an auxiliary scalar problem.
/// Boundary nodes of data.u are kept as the Dirichlet data.
inline ScalarSolveResult solve_scalar_pde(ScalarPdeKind kind, const Grid& g,
                                          const ScalarPdeData& data, const Parameters& p,
                                          const NewtonOptions& opt = {}) {
    ScalarPdeData work = data;
    Vector x = pack_interior(g, data.u);
    auto eval = [&](const Vector& v) {
        unpack_interior(g, v, work.u);
        ScalarSystem s = assemble_scalar_pde(kind, g, work, p);
        const double m = s.residual.lpNorm<Eigen::Infinity>();
        return detail::Evaluation{std::move(s.residual), m};
    };
    auto jac = [&](const Vector& v) {
        unpack_interior(g, v, work.u);
        return assemble_scalar_pde(kind, g, work, p).jacobian;
    };
    ScalarSolveResult out;
    out.report = detail::newton_core(x, eval, jac, opt);
    out.u = data.u;
    unpack_interior(g, x, out.u);
    return out;
}

}  // namespace ldg
