#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ldg/parameters.hpp"

namespace ldg {

/// Uniform tensor grid on [-1,1]^2 with n nodes per side.
///
/// Node (i, j) sits at x = -1 + i h, y = -1 + j h; storage is row-major in j.
/// n must be odd so that the centre, the axes and both diagonals are grid lines.
class Grid {
public:
    explicit Grid(int n) : n_(n), h_(2.0 / (n - 1)) {
        if (n < 17 || n % 2 == 0) throw ConfigError("grid size n must be odd and >= 17");
    }

    [[nodiscard]] int n() const { return n_; }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] int interior() const { return n_ - 2; }
    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
    [[nodiscard]] std::size_t interior_size() const {
        return static_cast<std::size_t>(n_ - 2) * (n_ - 2);
    }
    [[nodiscard]] int centre() const { return (n_ - 1) / 2; }

    [[nodiscard]] double x(int i) const { return -1.0 + i * h_; }
    [[nodiscard]] double y(int j) const { return -1.0 + j * h_; }

    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * n_ + i;
    }
    /// Position of interior node (i, j) among the (n-2)^2 unknowns of one component.
    [[nodiscard]] std::size_t interior_index(int i, int j) const {
        return static_cast<std::size_t>(j - 1) * (n_ - 2) + (i - 1);
    }

    [[nodiscard]] bool is_boundary(int i, int j) const {
        return i == 0 || j == 0 || i == n_ - 1 || j == n_ - 1;
    }

    /// Boundary node lying within arc length `eps` of a square corner.
    [[nodiscard]] bool in_corner_window(int i, int j, double eps) const {
        if (!is_boundary(i, j)) return false;
        const double dx = 1.0 - std::abs(x(i));
        const double dy = 1.0 - std::abs(y(j));
        return std::min(dx, dy) < eps + 1e-12 && (dx < 1e-12 || dy < 1e-12) &&
               std::max(dx, dy) < eps + 1e-12;
    }

    /// Trapezoidal weight of node (i, j), in units of h^2.
    [[nodiscard]] double trapezoid_weight(int i, int j) const {
        double w = 1.0;
        if (i == 0 || i == n_ - 1) w *= 0.5;
        if (j == 0 || j == n_ - 1) w *= 0.5;
        return w;
    }

    bool operator==(const Grid& o) const { return n_ == o.n_; }

private:
    int n_;
    double h_;
};

/// Corner truncation used when none is configured: max(0.05, 3h).
inline double default_epsilon(const Grid& g) { return std::max(0.05, 3.0 * g.h()); }

/// One real value per grid node, row-major.
struct ScalarField {
    int n = 0;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : n(g.n()), values(g.size(), fill) {}

    double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * n + i]; }
    double operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
    [[nodiscard]] bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Fills a field from f(x, y) at every node.
template <class F>
ScalarField sample(const Grid& g, F&& f) {
    ScalarField out(g);
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

/// Trapezoidal rule over the full square.
inline double integrate(const Grid& g, const ScalarField& f) {
    double sum = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) sum += g.trapezoid_weight(i, j) * f(i, j);
    return sum * g.h() * g.h();
}

inline double max_abs_difference(const ScalarField& a, const ScalarField& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("field size mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

}  // namespace ldg
