#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ldg/energy.hpp"
#include "ldg/linear.hpp"
#include "ldg/residual.hpp"

namespace ldg {

/// Hessian of the discrete energy with respect to the interior unknowns:
/// H = -h^2 W J, symmetrized.
inline SparseMatrix assemble_hessian(const Grid& g, const State& s, const Parameters& p) {
    const Vector w = component_weights(g);
    const SparseMatrix J = assemble_jacobian(g, s, p);
    SparseMatrix H = w.asDiagonal() * J;
    H *= -g.h() * g.h();
    SparseMatrix Ht = H.transpose();
    SparseMatrix out = 0.5 * (H + Ht);
    out.makeCompressed();
    return out;
}

class EigenSolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EigenOptions {
    int k = 5;
    double tol = 1e-10;        // Ritz residual relative to the shift-inverted eigenvalue
    int krylov_dim = 40;
    int max_restarts = 300;
    unsigned seed = 12345;
};

struct SpectrumResult {
    std::vector<double> eigenvalues;   // ascending
    std::vector<Vector> eigenvectors;  // mass-normalized: mass * v.v = 1
    bool stable = false;               // smallest > -1e-8 * norm
    double norm = 0.0;                 // infinity norm of H / mass
    double shift = 0.0;
    double max_residual = 0.0;         // max |(H/mass) v - lambda v| / norm
    int morse_index = 0;               // negative eigenvalues among those computed

    [[nodiscard]] double min_eig() const { return eigenvalues.empty() ? NAN : eigenvalues.front(); }
};

namespace detail {

inline double inf_norm(const SparseMatrix& A) {
    Vector rows = Vector::Zero(A.rows());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

inline SparseMatrix shifted(const SparseMatrix& A, double sigma) {
    SparseMatrix I(A.rows(), A.cols());
    I.setIdentity();
    SparseMatrix S = A - sigma * I;
    S.makeCompressed();
    return S;
}

inline void orthogonalize(Vector& w, const std::vector<Vector>& basis) {
    for (int pass = 0; pass < 2; ++pass)
        for (const Vector& y : basis) w -= y.dot(w) * y;
}

struct RitzPair {
    double theta;
    Vector v;
};

// Krylov-Schur iteration for the `nev` largest eigenvalues of a symmetric
// positive operator, deflated against the orthonormal vectors in `locked`.
template <class Op>
std::vector<RitzPair> krylov_schur(const Op& op, Eigen::Index N, int nev,
                                   const std::vector<Vector>& locked, const EigenOptions& opt,
                                   std::mt19937_64& rng) {
    const Eigen::Index room = N - static_cast<Eigen::Index>(locked.size());
    if (room <= 0) return {};
    const int m = static_cast<int>(std::min<Eigen::Index>(room, std::max(opt.krylov_dim, 2 * nev + 10)));
    nev = std::min(nev, m);
    std::normal_distribution<double> normal;
    auto random_unit = [&]() {
        Vector v(N);
        for (Eigen::Index i = 0; i < N; ++i) v[i] = normal(rng);
        orthogonalize(v, locked);
        return Vector(v / v.norm());
    };

    Eigen::MatrixXd V(N, m + 1);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    V.col(0) = random_unit();
    int p = 0;
    double beta = 0.0;
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        for (int j = p; j < m; ++j) {
            Vector w = op(Vector(V.col(j)));
            orthogonalize(w, locked);
            Vector h = V.leftCols(j + 1).transpose() * w;
            w -= V.leftCols(j + 1) * h;
            const Vector h2 = V.leftCols(j + 1).transpose() * w;
            w -= V.leftCols(j + 1) * h2;
            h += h2;
            for (int i = 0; i <= j; ++i) T(i, j) = T(j, i) = h[i];
            beta = w.norm();
            if (beta <= 1e-14 * std::abs(h[j])) {
                // invariant subspace: continue with a fresh orthogonal direction
                Vector r = random_unit();
                r -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * r);
                r -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * r);
                V.col(j + 1) = r / r.norm();
                beta = 0.0;
            } else {
                V.col(j + 1) = w / beta;
            }
            if (j + 1 < m) T(j + 1, j) = T(j, j + 1) = beta;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // descending order
        std::vector<int> order(m);
        for (int i = 0; i < m; ++i) order[i] = m - 1 - i;
        bool done = true;
        for (int i = 0; i < nev; ++i) {
            const int c = order[i];
            const double res = std::abs(beta * es.eigenvectors()(m - 1, c));
            if (res > opt.tol * std::abs(es.eigenvalues()[c])) done = false;
        }
        if (done || restart == opt.max_restarts) {
            if (!done) throw EigenSolverError("Krylov-Schur iteration did not converge");
            std::vector<RitzPair> out;
            for (int i = 0; i < nev; ++i) {
                const int c = order[i];
                Vector v = V.leftCols(m) * es.eigenvectors().col(c);
                out.push_back({es.eigenvalues()[c], v / v.norm()});
            }
            return out;
        }
        const int keep = std::min(m - 1, nev + (m - nev) / 2);
        Eigen::MatrixXd S(m, keep);
        for (int i = 0; i < keep; ++i) S.col(i) = es.eigenvectors().col(order[i]);
        Eigen::MatrixXd Vk = V.leftCols(m) * S;
        const Vector last = V.col(m);
        V.leftCols(keep) = Vk;
        V.col(keep) = last;
        T.setZero();
        for (int i = 0; i < keep; ++i) {
            T(i, i) = es.eigenvalues()[order[i]];
            T(keep, i) = T(i, keep) = beta * S(m - 1, i);
        }
        p = keep;
    }
    throw EigenSolverError("Krylov-Schur iteration did not converge");
}

}  // namespace detail

/// The k algebraically smallest eigenpairs of H v = lambda * mass * v for a
/// symmetric H. Shift-invert about a shift sigma below the spectrum, found by
/// testing H/mass - sigma I for positive definiteness with sparse Cholesky.
inline SpectrumResult smallest_eigenvalues(const SparseMatrix& H, int k, double mass = 1.0,
                                           EigenOptions opt = {}) {
    if (H.rows() != H.cols()) throw std::invalid_argument("Hessian must be square");
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    opt.k = k;
    const Eigen::Index N = H.rows();
    if (k < 1 || k > N) throw std::invalid_argument("k out of range");
    const SparseMatrix A = H / mass;
    const double norm = detail::inf_norm(A);

    // shift search
    SparseCholesky chol;
    double tau = 1e-6 * std::max(norm, 1e-300);
    double lo = -tau;  // candidate shift
    double hi = NAN;   // a shift known to be above lambda_min
    int grow = 0;
    while (!chol.factor(detail::shifted(A, lo))) {
        hi = lo;
        lo *= 4.0;
        if (++grow > 60) throw EigenSolverError("could not find a shift below the spectrum");
    }
    if (!std::isnan(hi)) {
        for (int b = 0; b < 8; ++b) {
            const double mid = 0.5 * (lo + hi);
            SparseCholesky trial;
            if (trial.factor(detail::shifted(A, mid)))
                lo = mid;
            else
                hi = mid;
        }
        chol.factor(detail::shifted(A, lo));
    }
    const double sigma = lo;
    auto op = [&](const Vector& v) { return Vector(chol.solve(v)); };

    std::mt19937_64 rng(opt.seed);
    std::vector<Vector> locked;
    std::vector<double> thetas;
    auto lock = [&](const std::vector<detail::RitzPair>& pairs) {
        for (const auto& rp : pairs) {
            Vector v = rp.v;
            detail::orthogonalize(v, locked);
            locked.push_back(v / v.norm());
            thetas.push_back(rp.theta);
        }
    };
    lock(detail::krylov_schur(op, N, std::min<int>(k, static_cast<int>(N)), locked, opt, rng));
    // deflate and search again until nothing above the k-th largest theta remains
    while (static_cast<Eigen::Index>(locked.size()) < N) {
        std::vector<double> sorted = thetas;
        std::sort(sorted.rbegin(), sorted.rend());
        const double kth = sorted[static_cast<std::size_t>(std::min<std::size_t>(k, sorted.size()) - 1)];
        const auto more = detail::krylov_schur(op, N, 1, locked, opt, rng);
        if (more.empty() || more.front().theta <= kth * (1.0 + 1e-9)) break;
        lock(more);
    }

    std::vector<int> idx(thetas.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return thetas[a] > thetas[b]; });

    SpectrumResult res;
    res.norm = norm;
    res.shift = sigma;
    for (int i = 0; i < k && i < static_cast<int>(idx.size()); ++i) {
        const Vector& v = locked[static_cast<std::size_t>(idx[i])];
        const double lambda = v.dot(A * v);  // Rayleigh quotient
        const double r = (A * v - lambda * v).norm();
        res.max_residual = std::max(res.max_residual, r / std::max(norm, 1e-300));
        res.eigenvalues.push_back(lambda);
        res.eigenvectors.push_back(v / std::sqrt(mass));
    }
    std::vector<int> perm(res.eigenvalues.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    std::sort(perm.begin(), perm.end(),
              [&](int a, int b) { return res.eigenvalues[a] < res.eigenvalues[b]; });
    std::vector<double> ev;
    std::vector<Vector> vecs;
    for (int i : perm) {
        ev.push_back(res.eigenvalues[i]);
        vecs.push_back(res.eigenvectors[i]);
    }
    res.eigenvalues = std::move(ev);
    res.eigenvectors = std::move(vecs);
    const double tol_eig = -1e-8 * norm;
    res.stable = res.eigenvalues.front() > tol_eig;
    for (double l : res.eigenvalues) res.morse_index += l < tol_eig;
    return res;
}

/// Smallest eigenvalues of the energy Hessian with the L2 mass h^2 I, so the
/// values approximate those of the continuous second variation.
inline SpectrumResult stability_spectrum(const Grid& g, const State& s, const Parameters& p,
                                         int k = 5, const EigenOptions& opt = {}) {
    return smallest_eigenvalues(assemble_hessian(g, s, p), k, g.h() * g.h(), opt);
}

enum class PerturbationClass { in_plane, out_of_plane };

/// Quadratic forms of the second variation for the two perturbation classes:
///   out_of_plane: integral (6 + L2)|grad v3|^2 + kappa v3^2 {6A - 12B q3 + 72C q3^2 + 6C(2q1^2 + 2q2^2 + 6q3^2)}
///   in_plane:     integral (2 + L2)(|grad v1|^2 + |grad v2|^2) + 2 L2 (v1,x v2,y - v1,y v2,x)
///                 + kappa {(2A + 4B q3 + 2C(2q1^2 + 2q2^2 + 6q3^2))(v1^2 + v2^2) + 8C(q1 v1 + q2 v2)^2}
/// with kappa = lambda_bar_sq/(2C). Gradients live on edges and cells and the
/// zeroth-order terms use the trapezoidal rule, as in total_energy.
/// The perturbation State holds (v1, v2, v3); components outside the class are ignored.
inline double second_variation(const Grid& g, const State& s, const Parameters& p,
                               PerturbationClass cls, const State& v) {
    const int n = g.n();
    const double h = g.h();
    const double kappa = p.bulk_weight();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (g.is_boundary(i, j)) {
                const bool bad = cls == PerturbationClass::out_of_plane
                                     ? v.q3(i, j) != 0.0
                                     : (v.q1(i, j) != 0.0 || v.q2(i, j) != 0.0);
                if (bad) throw std::invalid_argument("perturbation must vanish on the boundary");
            }
    auto dirichlet = [&](const ScalarField& f) {
        double e = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i + 1 < n; ++i) {
                const double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
                const double d = (f(i + 1, j) - f(i, j)) / h;
                e += w * d * d;
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j + 1 < n; ++j) {
                const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
                const double d = (f(i, j + 1) - f(i, j)) / h;
                e += w * d * d;
            }
        return e * h * h;
    };
    double total = 0.0;
    if (cls == PerturbationClass::out_of_plane) {
        total += (6.0 + p.L2) * dirichlet(v.q3);
        double b = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double q1 = s.q1(i, j), q2 = s.q2(i, j), q3 = s.q3(i, j), v3 = v.q3(i, j);
                b += g.trapezoid_weight(i, j) * v3 * v3 *
                     (6 * p.A - 12 * p.B * q3 + 72 * p.C * q3 * q3 +
                      6 * p.C * (2 * q1 * q1 + 2 * q2 * q2 + 6 * q3 * q3));
            }
        total += kappa * b * h * h;
        return total;
    }
    total += (2.0 + p.L2) * (dirichlet(v.q1) + dirichlet(v.q2));
    double det = 0.0;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i)
            det += detail::cell_dx(v.q1, i, j, h) * detail::cell_dy(v.q2, i, j, h) -
                   detail::cell_dy(v.q1, i, j, h) * detail::cell_dx(v.q2, i, j, h);
    total += 2.0 * p.L2 * det * h * h;
    double b = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double q1 = s.q1(i, j), q2 = s.q2(i, j), q3 = s.q3(i, j);
            const double v1 = v.q1(i, j), v2 = v.q2(i, j);
            const double proj = q1 * v1 + q2 * v2;
            b += g.trapezoid_weight(i, j) *
                 ((2 * p.A + 4 * p.B * q3 + 2 * p.C * (2 * q1 * q1 + 2 * q2 * q2 + 6 * q3 * q3)) *
                      (v1 * v1 + v2 * v2) +
                  8 * p.C * proj * proj);
        }
    total += kappa * b * h * h;
    return total;
}

}  // namespace ldg
