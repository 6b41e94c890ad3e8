// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "ldg/ldg.hpp"
#include "support.hpp"

using namespace ldg;

namespace {

constexpr int kN = 129;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double sup(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

// Continues the WORS-seeded symmetric branch from lambda = 5 to `lam`.
State symmetric_branch_end(const Grid& g, double L2, double lam, double& min_eig) {
    const Parameters p = default_parameters(L2, 5.0, default_epsilon(g));
    SweepOptions opt;
    opt.symmetric = true;
    opt.stability = false;
    const Branch b = sweep(g, seed_state(SeedKind::wors, g, p), p, SweepAxis::lambda_bar_sq, 5.0, lam, opt);
    if (b.terminated || b.states.empty()) throw std::runtime_error("symmetric branch ended early: " + b.message);
    min_eig = stability_spectrum(g, b.states.back(), p.with_lambda_bar_sq(lam)).min_eig();
    return b.states.back();
}

Outcome ac1() {
    const Grid g(kN);
    double worst = 0.0;
    for (double L2 : {-0.5, 0.0, 1.0, 10.0})
        for (double lam : {0.1, 5.0, 500.0}) {
            const Parameters p = default_parameters(L2, lam);
            State lower(g);
            for (double& v : lower.q3.values) v = -p.s_plus / 6;
            worst = std::max(worst, sup(assemble_residual(g, lower, p)));
        }
    for (double A : {-100.0, -3900.0, -20000.0}) {
        const Parameters p = make_parameters(A, kDefaultB, kDefaultC, 1.0, 50.0, 0.05);
        State upper(g);
        for (double& v : upper.q3.values) v = p.s_plus / 3;
        worst = std::max(worst, sup(assemble_residual(g, upper, p)));
    }
    return {worst <= 1e-12, fmt("max residual %.3e (tol 1e-12)", worst)};
}

Outcome ac2() {
    const Grid g(kN);
    double grad_err = 0.0, hess_err = 0.0;
    for (unsigned k = 0; k < 10; ++k) {
        const double L2 = std::vector<double>{-0.5, 0.0, 1.0, 10.0}[k % 4];
        const double lam = std::vector<double>{0.1, 5.0, 50.0, 500.0}[k % 4];
        const Parameters p = default_parameters(L2, lam, default_epsilon(g));
        const State s = testing_support::random_state(g, p, 100 + k, 0.5 * p.s_plus);
        const State d = testing_support::random_direction(g, 200 + k);
        const Vector dv = pack_interior(g, d);
        auto E = [&](double t) { return total_energy(g, testing_support::axpy(s, t, d), p).total; };

        const double t1 = 1e-5;
        const double fd = (E(t1) - E(-t1)) / (2 * t1);
        const Vector w = component_weights(g);
        const double an = -g.h() * g.h() * w.cwiseProduct(assemble_residual(g, s, p)).dot(dv);
        grad_err = std::max(grad_err, std::abs(fd - an) / std::abs(an));

        const double t2 = 1e-3;
        const double fd2 = (E(t2) - 2 * E(0) + E(-t2)) / (t2 * t2);
        const double quad = dv.dot(assemble_hessian(g, s, p) * dv);
        hess_err = std::max(hess_err, std::abs(fd2 - quad) / std::abs(quad));
    }
    return {grad_err <= 1e-5 && hess_err <= 1e-4,
            fmt("gradient rel err %.2e (tol 1e-5), Hessian rel err %.2e (tol 1e-4)", grad_err, hess_err)};
}

// Shared by AC3 and AC4.
std::vector<std::pair<double, State>> small_lambda_solutions;

Outcome ac3() {
    const Grid g(kN);
    bool ok = true;
    std::string detail;
    small_lambda_solutions.clear();
    for (double L2 : {-0.5, 0.0, 1.0, 10.0}) {
        const Parameters p = default_parameters(L2, 0.1, default_epsilon(g));
        std::vector<State> sols;
        for (unsigned seed = 1; seed <= 5; ++seed) {
            const NewtonResult r = newton_solve(g, testing_support::random_state(g, p, seed, p.s_plus), p);
            if (!r.report.converged) {
                ok = false;
                detail += fmt("L2=%g seed %u did not converge; ", L2, seed);
                continue;
            }
            sols.push_back(r.state);
        }
        if (sols.empty()) continue;
        double spread = 0.0;
        for (std::size_t a = 0; a < sols.size(); ++a)
            for (std::size_t b = a + 1; b < sols.size(); ++b)
                spread = std::max(spread, max_abs_difference(sols[a], sols[b]));
        const double me = stability_spectrum(g, sols.front(), p).min_eig();
        ok = ok && spread < 1e-6 * p.s_plus && me > 0;
        detail += fmt("L2=%g spread %.1e*s min_eig %.2f; ", L2, spread / p.s_plus, me);
        small_lambda_solutions.emplace_back(L2, sols.front());
    }
    return {ok, detail};
}

Outcome ac4() {
    const Grid g(kN);
    if (small_lambda_solutions.empty()) ac3();
    const double s = default_parameters().s_plus;
    bool ok = !small_lambda_solutions.empty();
    std::string detail;
    const int n = g.n(), c = g.centre();
    for (const auto& [L2, st] : small_lambda_solutions) {
        double diag = 0.0, axes = 0.0;
        for (int k = 0; k < n; ++k) {
            diag = std::max({diag, std::abs(st.q1(k, k)), std::abs(st.q1(k, n - 1 - k))});
            axes = std::max({axes, std::abs(st.q2(c, k)), std::abs(st.q2(k, c))});
        }
        ok = ok && diag < 1e-6 * s && axes < 1e-6 * s;
        detail += fmt("L2=%g q1|diag %.1e*s q2|axes %.1e*s; ", L2, diag / s, axes / s);
    }
    return {ok, detail};
}

Outcome ac5() {
    const Grid g(kN);
    bool ok = true;
    std::string detail;
    for (double L2 : {-0.5, 0.0, 1.0, 10.0}) {
        const Parameters p = default_parameters(L2, 5.0, default_epsilon(g));
        const NewtonResult r = newton_solve(g, seed_state(SeedKind::wors, g, p), p);
        if (!r.report.converged) {
            ok = false;
            detail += fmt("L2=%g no convergence; ", L2);
            continue;
        }
        const double me = stability_spectrum(g, r.state, p).min_eig();
        const double q2_max = r.state.q2.max_abs();
        double lo = 1e300, hi = -1e300;
        for (double v : r.state.q2.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const bool wors = q2_max <= 1e-10 * p.s_plus;
        const bool shape = L2 == 0.0 ? wors : (hi - lo) > 1e-6 * p.s_plus;
        ok = ok && me > 0 && shape;
        detail += fmt("L2=%g min_eig %.2f max|q2| %.1e*s; ", L2, me, q2_max / p.s_plus);
    }
    return {ok, detail};
}

Outcome ac6() {
    const Grid g(kN);
    bool ok = true;
    std::string detail;
    for (double L2 : {-0.5, 0.0, 1.0, 10.0}) {
        double me = 0.0;
        const State st = symmetric_branch_end(g, L2, 500.0, me);
        const Parameters p = default_parameters(L2, 500.0, default_epsilon(g));
        if (L2 < 10.0) {
            ok = ok && me < 0;
            detail += fmt("L2=%g min_eig %.1f; ", L2, me);
            continue;
        }
        double dev = 0.0;
        for (int j = 0; j < g.n(); ++j)
            for (int i = 0; i < g.n(); ++i)
                if (std::abs(g.x(i)) <= 0.5 && std::abs(g.y(j)) <= 0.5)
                    dev = std::max(dev, std::abs(st.q3(i, j) - p.s_plus / 3));
        const Label l = classify(g, st, p);
        ok = ok && me > 0 && dev < 0.05 * p.s_plus && l == Label::Constant;
        detail += fmt("L2=%g min_eig %.1f %s max|q3-s/3| %.1e*s on central subsquare", L2, me,
                      to_string(l).c_str(), dev / p.s_plus);
    }
    return {ok, detail};
}

Outcome ac7() {
    const Grid g(kN);
    const Parameters p0 = default_parameters(0.0, 0.01, default_epsilon(g));
    const ScalarField q0 = solve_q0(g, p0);
    const ScalarField h0 = solve_h0(g, p0, q0);
    auto gaps = [&](double L2) {
        const Parameters p = p0.with_L2(L2);
        State a(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            a.q1.values[k] = q0.values[k];
            a.q3.values[k] = -p.s_plus / 6 + L2 * h0.values[k];
        }
        apply_boundary(g, p, a);
        const NewtonResult r = newton_solve(g, a, p);
        if (!r.report.converged) throw std::runtime_error("no convergence from the asymptotic start");
        return std::pair{max_abs_difference(r.state, a), max_abs_difference(r.state.q2, a.q2)};
    };
    const auto [full, q2a] = gaps(0.1);
    const auto [half_full, q2b] = gaps(0.05);
    const double s = p0.s_plus;
    return {full <= 0.02 * s && q2a / q2b >= 3.0,
            fmt("gap %.2e*s (tol 0.02), q2 gap ratio on halving L2 %.2f (need >= 3)", full / s, q2a / q2b)};
}

Outcome ac8() {
    const Grid g(kN);
    const Parameters p = default_parameters(0.0, 0.0, 1e-9);
    const double s = p.s_plus;
    const double centre = eval_h0(0, 0, s);
    const ScalarField q0 = solve_q0(g, p);
    const ScalarField h0 = solve_h0(g, p, q0);
    double eq = 0.0, eh = 0.0;
    for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i) {
            if (std::abs(g.x(i)) > 0.75 || std::abs(g.y(j)) > 0.75) continue;
            eq = std::max(eq, std::abs(q0(i, j) - eval_q0(g.x(i), g.y(j), s)));
            eh = std::max(eh, std::abs(h0(i, j) - eval_h0(g.x(i), g.y(j), s)));
        }
    const double tol = std::max(2 * g.h() * g.h(), 1e-6 * s);
    return {centre > s / 18 && eq <= tol && eh <= tol,
            fmt("h0(0,0) = %.5f > s/18 = %.5f; |q0 - FD| %.2e, |h0 - FD| %.2e on |x|,|y|<=0.75 (tol %.2e)",
                centre, s / 18, eq, eh, tol)};
}

Outcome ac9() {
    const Grid g(kN);
    const double s = default_parameters().s_plus, eps = 0.05;
    const ScalarField tD = theta_harmonic(g, ThetaBoundary::D, eps);
    const ScalarField tR = theta_harmonic(g, ThetaBoundary::R, eps);
    const double jD = J_infty_numeric(g, tD, 0.0, s, eps), jR = J_infty_numeric(g, tR, 0.0, s, eps);
    const double cD = J_infty_closed(ThetaBoundary::D, eps, 0.0, s, 2.0);
    const double cR = J_infty_closed(ThetaBoundary::R, eps, 0.0, s, 2.0);
    const double agree = std::max(std::abs(jD - cD) / cD, std::abs(jR - cR) / cR);
    double scale = 0.0;
    for (double L2 : {-0.5, 1.0, 10.0}) {
        scale = std::max(scale, std::abs(J_infty_numeric(g, tD, L2, s, eps) / jD - (1 + L2 / 2)));
        scale = std::max(scale, std::abs(J_infty_closed(ThetaBoundary::R, eps, L2, s, 2.0) / cR - (1 + L2 / 2)));
    }
    return {jD < jR && cD < cR && agree <= 0.05 && scale <= 1e-12,
            fmt("J(D) %.2f < J(R) %.2f; closed %.2f / %.2f, rel diff %.2e (tol 0.05); scaling err %.1e", jD, jR,
                cD, cR, agree, scale)};
}

Outcome ac10() {
    constexpr double reference = 41.6817;
    const Parameters p = default_parameters();
    GeodesicOptions opt;
    const GeodesicResult e = transition_cost(p, opt);
    opt.metric = PathMetric::q_norm;
    const GeodesicResult q = transition_cost(p, opt);
    const double err = std::abs(e.c1 - reference) / reference;
    std::printf("  normalization report: euclidean |dq| c1 = %.4f (rel err %.2e), "
                "weighted (2,2,6) c1 = %.4f (rel err %.2e), reference %.4f\n",
                e.c1, err, q.c1, std::abs(q.c1 - reference) / reference, reference);
    return {err <= 0.02, fmt("c1 = %.4f vs %.4f, rel err %.2e (tol 0.02)", e.c1, reference, err)};
}

Outcome ac11() {
    const Grid g(kN);
    bool ok = true;
    std::string detail;
    for (double L2 : {1.0, 0.0}) {
        const Parameters p50 = default_parameters(L2, 50.0, default_epsilon(g));
        SweepOptions opt;
        opt.symmetric = true;
        opt.stability = false;
        const Branch b = sweep(g, seed_state(SeedKind::ring_plus, g, p50), p50, SweepAxis::lambda_bar_sq, 50.0,
                               500.0, opt);
        const Parameters p = p50.with_lambda_bar_sq(500.0);
        if (b.terminated || classify(g, b.states.back(), p) != Label::RingPlus) {
            ok = false;
            detail += fmt("L2=%g no Ring+ at 500; ", L2);
            continue;
        }
        const State& ring = b.states.back();
        const NewtonResult m = newton_solve(g, mirror_state(ring), p);
        const double e0 = total_energy(g, ring, p).shifted;
        const double e1 = total_energy(g, m.state, p).shifted;
        const double rel = std::abs(e1 - e0) / std::abs(e0);
        ok = ok && m.report.converged && m.report.iterations <= 5;
        if (L2 == 0.0) ok = ok && rel <= 1e-6;
        detail += fmt("L2=%g mirror %d iterations, E %.3f vs %.3f (rel %.1e); ", L2, m.report.iterations, e0,
                      e1, rel);
    }
    return {ok, detail};
}

Outcome ac12() {
    const Grid g(kN);
    const Parameters p = default_parameters(0.0, 0.1, default_epsilon(g));
    SweepOptions opt;
    opt.symmetric = true;
    const Branch w = sweep(g, seed_state(SeedKind::wors, g, p), p, SweepAxis::lambda_bar_sq, 0.1, 500.0, opt);
    double lo = NAN, hi = NAN;
    for (std::size_t k = 1; k < w.records.size(); ++k)
        if (w.records[k - 1].min_eig > 0 && w.records[k].min_eig < 0) {
            lo = w.records[k - 1].lambda_bar_sq;
            hi = w.records[k].lambda_bar_sq;
            break;
        }
    const Parameters p500 = p.with_lambda_bar_sq(500.0);
    const NewtonResult d = newton_solve(g, seed_state(SeedKind::d, g, p500), p500);
    const NewtonResult r = newton_solve(g, seed_state(SeedKind::r, g, p500), p500);
    if (w.terminated || !d.report.converged || !r.report.converged)
        return {false, "WORS sweep or D/R solve failed: " + w.message};
    const double eW = w.records.back().energy_shifted;
    const double eD = total_energy(g, d.state, p500).shifted;
    const double eR = total_energy(g, r.state, p500).shifted;
    const bool labels = classify(g, d.state, p500) == Label::D && classify(g, r.state, p500) == Label::R;
    return {std::isfinite(hi) && hi < 500.0 && labels && eD < eW && eD < eR,
            fmt("WORS loses stability in lambda (%.2f, %.2f]; at 500: E(D) %.2f, E(R) %.2f, E(WORS) %.2f", lo, hi,
                eD, eR, eW)};
}

Outcome ac13() {
    // Boundary data held fixed across grids: eps = 3h at the coarsest grid.
    const double eps = 0.09375;
    std::vector<double> total, mid;
    for (int n : {65, 129, 257}) {
        const Grid g(n);
        const Parameters p = default_parameters(1.0, 5.0, eps);
        const NewtonResult r = newton_solve(g, seed_state(SeedKind::wors, g, p), p);
        if (!r.report.converged) return {false, fmt("no convergence at n=%d", n)};
        total.push_back(total_energy(g, r.state, p).total);
        mid.push_back(midpoint_energy(g, r.state, p).total);
    }
    auto order = [](const std::vector<double>& e) { return std::log2(std::abs(e[0] - e[1]) / std::abs(e[1] - e[2])); };
    const double o = order(total);
    return {o >= 1.9, fmt("E = %.8f, %.8f, %.8f; order %.3f (need >= 1.9); midpoint-rule energy order %.3f", total[0],
                          total[1], total[2], o, order(mid))};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> checks = {ac1, ac2, ac3, ac4,  ac5,  ac6, ac7,
                                                          ac8, ac9, ac10, ac11, ac12, ac13};
    std::set<int> only;
    for (int k = 1; k < argc; ++k) only.insert(std::stoi(argv[k]));
    int failed = 0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = checks[k]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("AC%-2d %s  %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
