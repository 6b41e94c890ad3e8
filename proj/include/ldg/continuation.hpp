#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldg/asymptotics.hpp"
#include "ldg/energy.hpp"
#include "ldg/limits.hpp"
#include "ldg/newton.hpp"
#include "ldg/stability.hpp"
#include "ldg/state.hpp"

namespace ldg {

enum class Label { WORS, RingPlus, RingMinus, Constant, pWORS, D, R, BD, Unclassified };

inline std::string to_string(Label l) {
    switch (l) {
        case Label::WORS: return "WORS";
        case Label::RingPlus: return "RingPlus";
        case Label::RingMinus: return "RingMinus";
        case Label::Constant: return "Constant";
        case Label::pWORS: return "pWORS";
        case Label::D: return "D";
        case Label::R: return "R";
        case Label::BD: return "BD";
        case Label::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

inline Label label_from_string(const std::string& s) {
    for (Label l : {Label::WORS, Label::RingPlus, Label::RingMinus, Label::Constant, Label::pWORS,
                    Label::D, Label::R, Label::BD, Label::Unclassified})
        if (to_string(l) == s) return l;
    throw std::invalid_argument("unknown label: " + s);
}

// ---------------------------------------------------------------------------
// Classification

struct ClassifyTolerances {
    double q2_zero = 1e-4;     // max|q2| below this (times s) means q2 = 0
    double symmetric = 1e-6;   // nodal-line defect below this (times s) means symmetric
    double centre_window = 0.1;
    double bd_fraction = 0.1;  // s^2 below this times s^2/4 counts as melted
};

namespace detail {
// Net rotation of the director along a straight grid line, unwrapped modulo pi.
inline double director_rotation(const ScalarField& theta, const std::vector<std::pair<int, int>>& line) {
    double total = 0.0;
    for (std::size_t k = 1; k < line.size(); ++k) {
        double d = theta(line[k].first, line[k].second) - theta(line[k - 1].first, line[k - 1].second);
        d -= std::numbers::pi * std::round(d / std::numbers::pi);
        total += d;
    }
    return total;
}

inline bool has_melted_line(const Grid& g, const DirectorView& v, double threshold) {
    const int n = g.n();
    for (int k = 1; k < n - 1; ++k) {
        bool row = true, col = true;
        for (int m = 1; m < n - 1 && (row || col); ++m) {
            if (v.s_sq(m, k) >= threshold) row = false;
            if (v.s_sq(k, m) >= threshold) col = false;
        }
        if (row || col) return true;
    }
    return false;
}
}  // namespace detail

/// Label of a converged state.
///
/// Symmetric states (q1 = 0 on the diagonals, q2 = 0 on the axes): Constant
/// when q3(0,0) is within the window of s/3 (q2 need not vanish once L2 != 0);
/// WORS when q2 = 0 and q3(0,0) is near -s/6; pWORS when
/// q2 changes sign at least twice along x = y; RingPlus/RingMinus when q2 < 0 / > 0
/// at every diagonal node with 0.1 < x < 0.9.
/// Other states: BD when s^2 stays melted along a whole interior grid line,
/// R when the director turns by about pi across one midline, D when it turns
/// by less than pi/2 across both.
inline Label classify(const Grid& g, const State& s, const Parameters& p,
                      const ClassifyTolerances& tol = {}) {
    const double sp = p.s_plus;
    const int c = g.centre();
    const int n = g.n();
    const SymmetryDefect def = symmetry_defect(g, s);
    const bool symmetric = std::max(def.d_diag, def.d_axes) < tol.symmetric * sp;
    if (symmetric) {
        if (std::abs(s.q3(c, c) - sp / 3.0) < tol.centre_window * sp) return Label::Constant;
        if (s.q2.max_abs() < tol.q2_zero * sp)
            return std::abs(s.q3(c, c) + sp / 6.0) < tol.centre_window * sp ? Label::WORS
                                                                            : Label::Unclassified;
        if (diagonal_sign_changes(g, s.q2, tol.q2_zero * sp) >= 2) return Label::pWORS;
        bool all_neg = true, all_pos = true;
        for (int k = c + 1; k < n - 1; ++k) {
            const double x = g.x(k);
            if (x <= 0.1 || x >= 0.9) continue;
            if (s.q2(k, k) >= 0) all_neg = false;
            if (s.q2(k, k) <= 0) all_pos = false;
        }
        if (all_neg) return Label::RingPlus;
        if (all_pos) return Label::RingMinus;
        return Label::Unclassified;
    }
    const DirectorView v = director_view(g, s);
    if (detail::has_melted_line(g, v, tol.bd_fraction * sp * sp / 4.0)) return Label::BD;
    std::vector<std::pair<int, int>> horiz, vert;
    for (int k = 0; k < n; ++k) {
        horiz.emplace_back(k, c);
        vert.emplace_back(c, k);
    }
    const double rx = std::abs(detail::director_rotation(v.theta, horiz));
    const double ry = std::abs(detail::director_rotation(v.theta, vert));
    const double half_pi = std::numbers::pi / 2.0;
    if (std::max(rx, ry) > 0.75 * std::numbers::pi && std::min(rx, ry) < half_pi) return Label::R;
    if (rx < half_pi && ry < half_pi) return Label::D;
    return Label::Unclassified;
}

// ---------------------------------------------------------------------------
// Seeds

enum class SeedKind { wors, ring_plus, ring_minus, pwors, constant, d, r };

inline std::string to_string(SeedKind k) {
    switch (k) {
        case SeedKind::wors: return "wors";
        case SeedKind::ring_plus: return "ring_plus";
        case SeedKind::ring_minus: return "ring_minus";
        case SeedKind::pwors: return "pwors";
        case SeedKind::constant: return "constant";
        case SeedKind::d: return "d";
        case SeedKind::r: return "r";
    }
    return "?";
}

inline SeedKind seed_kind_from_string(const std::string& s) {
    for (SeedKind k : {SeedKind::wors, SeedKind::ring_plus, SeedKind::ring_minus, SeedKind::pwors,
                       SeedKind::constant, SeedKind::d, SeedKind::r})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown seed kind: " + s);
}

/// Optional inputs some seeds need.
struct SeedInputs {
    const AsymptoticBundle* bundle = nullptr;  // pwors: needs gamma
    const State* ring_plus = nullptr;          // ring_minus: a converged Ring+
};

inline State seed_state(SeedKind kind, const Grid& g, const Parameters& p,
                        const SeedInputs& in = {}) {
    const double s = p.s_plus;
    switch (kind) {
        case SeedKind::wors: {
            ScalarSolveResult q = solve_allen_cahn(g, p);
            if (!q.report.converged) throw std::runtime_error("allen_cahn: " + q.report.message);
            State out = make_state(g, p, 0, 0, -s / 6.0);
            out.q1 = q.u;
            apply_boundary(g, p, out);
            return out;
        }
        case SeedKind::ring_plus: {
            // Director tangent to circles about the centre, melted core.
            State out(g);
            for (int j = 0; j < g.n(); ++j)
                for (int i = 0; i < g.n(); ++i) {
                    const double x = g.x(i), y = g.y(j);
                    const double core = std::exp(-(x * x + y * y) / 0.09);
                    const double phi = std::atan2(y, x);
                    out.q1(i, j) = -0.5 * s * (1.0 - core) * std::cos(2.0 * phi);
                    out.q2(i, j) = -0.5 * s * (1.0 - core) * std::sin(2.0 * phi);
                    out.q3(i, j) = -s / 6.0 + 0.5 * s * core;
                }
            apply_boundary(g, p, out);
            return out;
        }
        case SeedKind::ring_minus:
            if (!in.ring_plus) throw std::invalid_argument("ring_minus seed needs a converged Ring+");
            return mirror_state(*in.ring_plus);
        case SeedKind::pwors: {
            if (!in.bundle || !in.bundle->gamma)
                throw std::invalid_argument("pwors seed needs second-order asymptotic fields");
            const AsymptoticBundle& b = *in.bundle;
            const double L2 = p.L2;
            State out(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                out.q1.values[k] = b.q.values[k] + L2 * b.f.values[k];
                out.q2.values[k] = L2 * b.g.values[k] + L2 * L2 * b.gamma->values[k];
                out.q3.values[k] = -s / 6.0 + L2 * b.h.values[k];
            }
            apply_boundary(g, p, out);
            return out;
        }
        case SeedKind::constant: {
            State out = make_state(g, p, 0, 0, s / 3.0);
            const int n = g.n();
            for (int j = 1; j < n - 1; ++j)
                for (int i = 1; i < n - 1; ++i) {
                    const int d = std::min({i, j, n - 1 - i, n - 1 - j});
                    if (d >= 2) continue;
                    // nearest boundary node
                    int bi = i, bj = j;
                    if (d == i) bi = 0;
                    else if (d == n - 1 - i) bi = n - 1;
                    else if (d == j) bj = 0;
                    else bj = n - 1;
                    const double t = 0.5 * d;
                    for (int c = 0; c < 3; ++c) {
                        const double inner = c == 2 ? s / 3.0 : 0.0;
                        out.field(c)(i, j) = (1.0 - t) * out.field(c)(bi, bj) + t * inner;
                    }
                }
            return out;
        }
        case SeedKind::d:
        case SeedKind::r: {
            const ScalarField th =
                theta_harmonic(g, kind == SeedKind::d ? ThetaBoundary::D : ThetaBoundary::R, p.epsilon);
            State out(g);
            for (std::size_t k = 0; k < g.size(); ++k) {
                out.q1.values[k] = 0.5 * s * std::cos(2.0 * th.values[k]);
                out.q2.values[k] = 0.5 * s * std::sin(2.0 * th.values[k]);
                out.q3.values[k] = -s / 6.0;
            }
            apply_boundary(g, p, out);
            return out;
        }
    }
    throw std::invalid_argument("unknown seed kind");
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { lambda_bar_sq, L2 };

inline std::string to_string(SweepAxis a) { return a == SweepAxis::L2 ? "L2" : "lambda_bar_sq"; }

struct BranchRecord {
    double lambda_bar_sq = 0.0;
    double L2 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double energy_shifted = 0.0;
    double min_eig = 0.0;
    Label label = Label::Unclassified;
    int iterations = 0;
    int morse_index = 0;
    double final_residual = 0.0;
};

struct Branch {
    std::string name;
    SweepAxis axis = SweepAxis::lambda_bar_sq;
    std::vector<BranchRecord> records;
    std::vector<State> states;  // parallel to records when stored, else empty
    bool terminated = false;    // stopped before the end of the range
    std::string message;

    [[nodiscard]] double parameter(std::size_t k) const {
        return axis == SweepAxis::L2 ? records[k].L2 : records[k].lambda_bar_sq;
    }
};

struct StepPolicy {
    double initial = 5.0;
    double min = 1e-2;
    double max = 10.0;
    int grow_after = 3;
};

struct SweepOptions {
    StepPolicy step;
    NewtonOptions newton;
    bool symmetric = false;      // solve in the eighth-domain reduction
    bool stability = true;       // compute min_eig / Morse index per point
    bool store_states = true;
    EigenOptions eigen;
};

inline Parameters with_axis(const Parameters& p, SweepAxis axis, double v) {
    return axis == SweepAxis::L2 ? p.with_L2(v) : p.with_lambda_bar_sq(v);
}

/// Solves at one parameter value, symmetric or full.
inline NewtonResult solve_point(const Grid& g, const State& initial, const Parameters& p,
                                const SweepOptions& opt, const SymmetricReduction* red) {
    if (opt.symmetric) return newton_solve_symmetric(g, initial, p, opt.newton, red);
    return newton_solve(g, initial, p, opt.newton);
}

inline BranchRecord make_record(const Grid& g, const State& s, const Parameters& p,
                                const SolveReport& rep, const SweepOptions& opt) {
    BranchRecord r;
    r.lambda_bar_sq = p.lambda_bar_sq;
    r.L2 = p.L2;
    const Measures m = measures(g, s);
    r.m1 = m.m1;
    r.m2 = m.m2;
    r.energy_shifted = total_energy(g, s, p).shifted;
    if (opt.stability) {
        const SpectrumResult sp = stability_spectrum(g, s, p, opt.eigen.k, opt.eigen);
        r.min_eig = sp.min_eig();
        r.morse_index = sp.morse_index;
    } else {
        r.min_eig = std::numeric_limits<double>::quiet_NaN();
    }
    r.label = classify(g, s, p);
    r.iterations = rep.iterations;
    r.final_residual = rep.final_residual;
    return r;
}

/// Natural-parameter continuation from `seed` over [start, end] (either
/// direction). The seed is first solved at `start`; the step halves on failure,
/// grows by 2 after `grow_after` consecutive successes and the branch ends
/// (terminated = true) once the step would drop below `min`.
inline Branch sweep(const Grid& g, const State& seed, const Parameters& p, SweepAxis axis,
                    double start, double end, const SweepOptions& opt = {}) {
    if (!(opt.step.initial > 0 && opt.step.min > 0 && opt.step.max >= opt.step.min))
        throw ConfigError("invalid step policy");
    Branch b;
    b.axis = axis;
    std::optional<SymmetricReduction> red;
    if (opt.symmetric) red = make_symmetric_reduction(g);
    const SymmetricReduction* rp = red ? &*red : nullptr;

    const double dir = end >= start ? 1.0 : -1.0;
    Parameters cur_p = with_axis(p, axis, start);
    State seed_bc = seed;
    apply_boundary(g, cur_p, seed_bc);
    NewtonResult first = solve_point(g, seed_bc, cur_p, opt, rp);
    if (!first.report.converged) {
        b.terminated = true;
        b.message = "seed did not converge at range start: " + first.report.message;
        return b;
    }
    State cur = first.state;
    b.records.push_back(make_record(g, cur, cur_p, first.report, opt));
    if (opt.store_states) b.states.push_back(cur);

    double value = start;
    double step = std::min(opt.step.initial, opt.step.max);
    int successes = 0;
    while (dir * (end - value) > 1e-12) {
        const double next = dir > 0 ? std::min(end, value + step) : std::max(end, value - step);
        const Parameters np = with_axis(p, axis, next);
        NewtonResult r = solve_point(g, cur, np, opt, rp);
        if (r.report.converged) {
            cur = std::move(r.state);
            value = next;
            b.records.push_back(make_record(g, cur, np, r.report, opt));
            if (opt.store_states) b.states.push_back(cur);
            if (++successes >= opt.step.grow_after) {
                step = std::min(opt.step.max, 2.0 * step);
                successes = 0;
            }
        } else {
            successes = 0;
            step *= 0.5;
            if (step < opt.step.min) {
                b.terminated = true;
                b.message = "no convergence below minimum step at " + to_string(axis) + " = " +
                            std::to_string(next) + ": " + r.report.message;
                break;
            }
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Bifurcations

struct BifurcationInterval {
    double lo = 0.0;
    double hi = 0.0;
    int morse_lo = 0;  // Morse index at lo / hi (count among the computed eigenvalues)
    int morse_hi = 0;
};

/// Adjacent records whose Morse index differs (this includes every sign
/// change of min_eig).
inline std::vector<BifurcationInterval> detect_bifurcations(const Branch& b) {
    std::vector<BifurcationInterval> out;
    for (std::size_t k = 1; k < b.records.size(); ++k) {
        const BranchRecord& a = b.records[k - 1];
        const BranchRecord& c = b.records[k];
        if (a.morse_index != c.morse_index)
            out.push_back({b.parameter(k - 1), b.parameter(k), a.morse_index, c.morse_index});
    }
    return out;
}

/// As above, then each interval is bisected (solving from the stored state at
/// its lower end) until narrower than `width`.
inline std::vector<BifurcationInterval> detect_bifurcations(const Grid& g, const Branch& b,
                                                            const Parameters& p,
                                                            const SweepOptions& opt,
                                                            double width = 1e-2) {
    std::vector<BifurcationInterval> coarse = detect_bifurcations(b);
    if (b.states.size() != b.records.size()) return coarse;
    std::optional<SymmetricReduction> red;
    if (opt.symmetric) red = make_symmetric_reduction(g);
    for (BifurcationInterval& iv : coarse) {
        std::size_t k = 0;
        while (k + 1 < b.records.size() && b.parameter(k) != iv.lo) ++k;
        State left = b.states[k];
        while (std::abs(iv.hi - iv.lo) > width) {
            const double mid = 0.5 * (iv.lo + iv.hi);
            const Parameters mp = with_axis(p, b.axis, mid);
            NewtonResult r = solve_point(g, left, mp, opt, red ? &*red : nullptr);
            if (!r.report.converged) break;
            const int morse = stability_spectrum(g, r.state, mp, opt.eigen.k, opt.eigen).morse_index;
            if (morse == iv.morse_lo) {
                iv.lo = mid;
                left = std::move(r.state);
            } else {
                iv.hi = mid;
                iv.morse_hi = morse;
            }
        }
    }
    return coarse;
}

}  // namespace ldg
