#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ldg/grid.hpp"
#include "ldg/parameters.hpp"

namespace ldg {

enum class Component { q1 = 0, q2 = 1, q3 = 2 };

/// The reduced unknown (q1, q2, q3):
///   Q = q1 (x⊗x - y⊗y) + q2 (x⊗y + y⊗x) + q3 (2 z⊗z - x⊗x - y⊗y).
struct State {
    ScalarField q1, q2, q3;

    State() = default;
    explicit State(const Grid& g) : q1(g), q2(g), q3(g) {}

    ScalarField& operator[](Component c) {
        return c == Component::q1 ? q1 : (c == Component::q2 ? q2 : q3);
    }
    const ScalarField& operator[](Component c) const {
        return c == Component::q1 ? q1 : (c == Component::q2 ? q2 : q3);
    }
    ScalarField& field(int c) { return (*this)[static_cast<Component>(c)]; }
    const ScalarField& field(int c) const { return (*this)[static_cast<Component>(c)]; }

    [[nodiscard]] int n() const { return q1.n; }
};

inline constexpr std::array<Component, 3> kComponents = {Component::q1, Component::q2,
                                                         Component::q3};

inline double max_abs_difference(const State& a, const State& b) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m = std::max(m, max_abs_difference(a.field(c), b.field(c)));
    return m;
}

namespace detail {
inline bool on_square_boundary(double x, double y, double tol = 1e-12) {
    const bool inside = std::abs(x) <= 1.0 + tol && std::abs(y) <= 1.0 + tol;
    return inside && (std::abs(std::abs(x) - 1.0) <= tol || std::abs(std::abs(y) - 1.0) <= tol);
}
}  // namespace detail

/// Tangent boundary data for q1 on the square: +s/2 on y = ±1, -s/2 on x = ±1,
/// linear in arc length within `eps` of a corner (zero at the corner itself).
inline double q1_boundary(double x, double y, double s_plus, double eps) {
    const double half = 0.5 * s_plus;
    const bool horizontal = std::abs(std::abs(y) - 1.0) <= 1e-12;
    const bool vertical = std::abs(std::abs(x) - 1.0) <= 1e-12;
    if (horizontal && vertical) return 0.0;
    if (horizontal) {
        const double d = 1.0 - std::abs(x);
        return d < eps ? half * d / eps : half;
    }
    const double d = 1.0 - std::abs(y);
    return d < eps ? -half * d / eps : -half;
}

/// Dirichlet value of one component at a boundary point.
inline double boundary_value(Component c, double x, double y, const Parameters& p) {
    if (!detail::on_square_boundary(x, y)) throw std::invalid_argument("point is not on the boundary");
    switch (c) {
        case Component::q1: return q1_boundary(x, y, p.s_plus, p.epsilon);
        case Component::q2: return 0.0;
        case Component::q3: return -p.s_plus / 6.0;
    }
    return 0.0;
}

/// Overwrites every boundary node with the Dirichlet data.
inline void apply_boundary(const Grid& g, const Parameters& p, State& s) {
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            if (!g.is_boundary(i, j)) continue;
            for (Component c : kComponents) s[c](i, j) = boundary_value(c, g.x(i), g.y(j), p);
        }
}

/// Constant (q1, q2, q3) inside, boundary data on the boundary.
inline State make_state(const Grid& g, const Parameters& p, double q1 = 0.0, double q2 = 0.0,
                        double q3 = 0.0) {
    State s(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        s.q1.values[k] = q1;
        s.q2.values[k] = q2;
        s.q3.values[k] = q3;
    }
    apply_boundary(g, p, s);
    return s;
}

/// Largest deviation of the boundary nodes from the Dirichlet data.
inline double boundary_mismatch(const Grid& g, const Parameters& p, const State& s) {
    double m = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            if (!g.is_boundary(i, j)) continue;
            for (Component c : kComponents)
                m = std::max(m, std::abs(s[c](i, j) - boundary_value(c, g.x(i), g.y(j), p)));
        }
    return m;
}

/// Order parameter and in-plane director derived from (q1, q2).
struct DirectorView {
    ScalarField s_sq;
    ScalarField theta;  // in (-pi/2, pi/2]
    ScalarField nx, ny;
};

inline DirectorView director_view(const Grid& g, const State& s) {
    DirectorView v{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double a = s.q1.values[k];
        const double b = s.q2.values[k];
        v.s_sq.values[k] = a * a + b * b;
        const double th = 0.5 * std::atan2(b, a);
        v.theta.values[k] = th;
        v.nx.values[k] = std::cos(th);
        v.ny.values[k] = std::sin(th);
    }
    return v;
}

/// Maps node (i, j) to its representative in the wedge {0 <= y <= x} and
/// returns the sign each component picks up: q1 is odd across the diagonals
/// and even across the axes, q2 the reverse, q3 even everywhere.
struct WedgeImage {
    int i = 0, j = 0;
    std::array<double, 3> sign{1.0, 1.0, 1.0};
};

inline WedgeImage wedge_image(const Grid& g, int i, int j) {
    const int c = g.centre();
    int X = i - c;
    int Y = j - c;
    WedgeImage w;
    if (X < 0) {
        X = -X;
        w.sign[1] = -w.sign[1];
    }
    if (Y < 0) {
        Y = -Y;
        w.sign[1] = -w.sign[1];
    }
    if (Y > X) {
        std::swap(X, Y);
        w.sign[0] = -w.sign[0];
    }
    w.i = c + X;
    w.j = c + Y;
    return w;
}

/// Builds the full-square state from values on the eighth {0 <= y <= x <= 1}.
///
/// Only the wedge nodes of `eighth` are read. q1 is zeroed on the diagonal and
/// q2 on the axis y = 0 so the reflected fields are single-valued.
inline State reflect_eighth_to_full(const Grid& g, const State& eighth) {
    State out(g);
    const int c = g.centre();
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            const WedgeImage w = wedge_image(g, i, j);
            const bool on_diag = (w.i - c) == (w.j - c);
            const bool on_axis = w.j == c;
            out.q1(i, j) = on_diag ? 0.0 : w.sign[0] * eighth.q1(w.i, w.j);
            out.q2(i, j) = on_axis ? 0.0 : w.sign[1] * eighth.q2(w.i, w.j);
            out.q3(i, j) = w.sign[2] * eighth.q3(w.i, w.j);
        }
    return out;
}

/// (max |q1| on the diagonals, max |q2| on the axes).
struct SymmetryDefect {
    double d_diag = 0.0;
    double d_axes = 0.0;
};

inline SymmetryDefect symmetry_defect(const Grid& g, const State& s) {
    SymmetryDefect d;
    const int n = g.n();
    const int c = g.centre();
    for (int k = 0; k < n; ++k) {
        d.d_diag = std::max({d.d_diag, std::abs(s.q1(k, k)), std::abs(s.q1(k, n - 1 - k))});
        d.d_axes = std::max({d.d_axes, std::abs(s.q2(c, k)), std::abs(s.q2(k, c))});
    }
    return d;
}

/// (q1, q2, q3) -> (q1, -q2, q3). Boundary data is preserved since q2 = 0 there.
inline State mirror_state(const State& s) {
    State m = s;
    for (double& v : m.q2.values) v = -v;
    return m;
}

}  // namespace ldg
