#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "ldg/grid.hpp"
#include "ldg/state.hpp"

namespace testing_support {

/// Interior values uniform in [-amp, amp], boundary data imposed.
inline ldg::State random_state(const ldg::Grid& g, const ldg::Parameters& p, unsigned seed,
                               double amp) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    ldg::State s(g);
    for (int c = 0; c < 3; ++c)
        for (double& v : s.field(c).values) v = u(rng);
    ldg::apply_boundary(g, p, s);
    return s;
}

/// Smooth state with q2 = 0 and q3 = -s/6 on the boundary (q1 is smooth but
/// does not follow the tangent data): (s/2)(y^2 - x^2) and -s/6 plus random sine modes.
inline ldg::State smooth_random_state(const ldg::Grid& g, const ldg::Parameters& p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ldg::State s(g);
    s.q1 = ldg::sample(g, [&](double x, double y) { return 0.5 * p.s_plus * (y * y - x * x); });
    s.q3 = ldg::ScalarField(g, -p.s_plus / 6.0);
    for (int c = 0; c < 3; ++c) {
        double a[3][3];
        for (auto& row : a)
            for (double& v : row) v = 0.5 * p.s_plus * u(rng);
        for (int j = 0; j < g.n(); ++j)
            for (int i = 0; i < g.n(); ++i) {
                double v = 0.0;
                for (int k = 1; k <= 3; ++k)
                    for (int l = 1; l <= 3; ++l)
                        v += a[k - 1][l - 1] / (k * l) *
                             std::sin(k * std::numbers::pi * (g.x(i) + 1) / 2) *
                             std::sin(l * std::numbers::pi * (g.y(j) + 1) / 2);
                s.field(c)(i, j) += v;
            }
    }
    return s;
}

/// Random interior-supported direction, zero on the boundary.
inline ldg::State random_direction(const ldg::Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ldg::State d(g);
    for (int c = 0; c < 3; ++c)
        for (int j = 1; j < g.n() - 1; ++j)
            for (int i = 1; i < g.n() - 1; ++i) d.field(c)(i, j) = u(rng);
    return d;
}

inline ldg::State axpy(const ldg::State& x, double t, const ldg::State& d) {
    ldg::State out = x;
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < out.field(c).values.size(); ++k)
            out.field(c).values[k] += t * d.field(c).values[k];
    return out;
}

}  // namespace testing_support
