#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ldg/ldg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ldg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConvergence = 1;
constexpr int kExitConfig = 2;

struct Globals {
    std::string config;
    std::string out = ".";
    std::optional<int> grid_n;
    std::optional<std::string> seed;
    std::optional<double> lambda_bar_sq;
    std::optional<double> L2;
};

RunConfig resolve(const Globals& g) {
    RunConfig cfg = g.config.empty() ? RunConfig{} : load_config(g.config);
    if (g.grid_n) cfg.n = *g.grid_n;
    if (g.seed) cfg.seed = *g.seed;
    if (g.lambda_bar_sq) cfg.lambda_bar_sq = *g.lambda_bar_sq;
    if (g.L2) cfg.L2 = *g.L2;
    cfg.validate();
    return cfg;
}

fs::path out_dir(const Globals& g) {
    fs::path d(g.out);
    fs::create_directories(d);
    return d;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// Seeds that need extra work before Newton: pwors (second-order fields) and
// ring_minus (a converged Ring+ to mirror).
std::optional<State> make_seed(SeedKind kind, const Grid& g, const Parameters& p,
                               const NewtonOptions& newton) {
    if (kind == SeedKind::pwors) {
        AsymptoticBundle b = build_first_order(g, p.with_L2(p.L2), newton);
        build_second_order(g, b);
        if (!b.gamma) return std::nullopt;
        SeedInputs in;
        in.bundle = &b;
        return seed_state(kind, g, p, in);
    }
    if (kind == SeedKind::ring_minus) {
        NewtonResult rp = newton_solve(g, seed_state(SeedKind::ring_plus, g, p), p, newton);
        if (!rp.report.converged) return std::nullopt;
        SeedInputs in;
        in.ring_plus = &rp.state;
        return seed_state(kind, g, p, in);
    }
    return seed_state(kind, g, p);
}

int cmd_solve(const Globals& gl, bool stability) {
    const RunConfig cfg = resolve(gl);
    const Grid g(cfg.n);
    const Parameters p = cfg.parameters();
    const SeedKind kind = seed_kind_from_string(cfg.seed);
    std::optional<State> seed = make_seed(kind, g, p, cfg.newton);
    if (!seed) {
        print({{"converged", false}, {"message", "seed construction failed"}});
        return kExitNoConvergence;
    }
    const NewtonResult r = newton_solve(g, *seed, p, cfg.newton);
    StateSnapshot snap{p, r.state, {}};
    snap.meta.label = to_string(classify(g, r.state, p));
    snap.meta.residual = r.report.final_residual;
    snap.meta.iterations = r.report.iterations;
    json report = {{"converged", r.report.converged},
                   {"iterations", r.report.iterations},
                   {"final_residual", r.report.final_residual},
                   {"residual_history", r.report.residual_history},
                   {"message", r.report.message},
                   {"label", snap.meta.label}};
    if (stability && r.report.converged) {
        const SpectrumResult sp = stability_spectrum(g, r.state, p, cfg.eigen_k);
        snap.meta.min_eig = sp.min_eig();
        report["min_eig"] = sp.min_eig();
        report["stable"] = sp.stable;
    }
    const EnergyBreakdown e = total_energy(g, r.state, p);
    report["energy_shifted"] = e.shifted;
    const fs::path dir = out_dir(gl);
    write_snapshot((dir / "snapshot.json").string(), snap);
    write_text((dir / "report.json").string(), report.dump(2) + "\n");
    print(report);
    return r.report.converged ? kExitOk : kExitNoConvergence;
}

int cmd_sweep(const Globals& gl) {
    const RunConfig cfg = resolve(gl);
    const Grid g(cfg.n);
    const SweepAxis axis = cfg.sweep_axis == "L2" ? SweepAxis::L2 : SweepAxis::lambda_bar_sq;
    const Parameters base = with_axis(cfg.parameters(), axis, cfg.sweep_start);
    SweepOptions opt;
    opt.newton = cfg.newton;
    opt.symmetric = cfg.sweep_symmetric;
    opt.step.initial = cfg.sweep_step;
    opt.store_states = false;
    opt.eigen.k = cfg.eigen_k;
    const fs::path dir = out_dir(gl);
    std::vector<ManifestEntry> entries;
    bool any_failed = false;
    for (const std::string& name : cfg.sweep_seeds) {
        Branch b;
        b.axis = axis;
        b.name = name;
        if (cfg.sweep_start != cfg.sweep_end) {
            std::optional<State> seed = make_seed(seed_kind_from_string(name), g, base, cfg.newton);
            if (seed) {
                b = sweep(g, *seed, base, axis, cfg.sweep_start, cfg.sweep_end, opt);
                b.name = name;
            } else {
                b.terminated = true;
                b.message = "seed construction failed";
            }
        }
        if (b.records.empty() && b.terminated) any_failed = true;
        const std::string file = "branch_" + name + ".csv";
        write_text((dir / file).string(), branch_to_csv(b));
        entries.push_back({name, file, b.records.size(), b.terminated, b.message});
        std::cerr << name << ": " << b.records.size() << " records"
                  << (b.terminated ? " (terminated: " + b.message + ")" : "") << "\n";
    }
    write_text((dir / "manifest.json").string(),
               manifest_to_string(entries, base, cfg.n, to_string(axis)));
    return any_failed ? kExitNoConvergence : kExitOk;
}

int cmd_stability(const Globals& gl, const std::string& snapshot_path) {
    const RunConfig cfg = resolve(gl);
    const StateSnapshot snap = read_snapshot(snapshot_path);
    const Grid g(snap.state.n());
    const SpectrumResult sp = stability_spectrum(g, snap.state, snap.params, cfg.eigen_k);
    json j = {{"eigenvalues", sp.eigenvalues},
              {"stable", sp.stable},
              {"morse_index", sp.morse_index},
              {"max_residual", sp.max_residual},
              {"norm", sp.norm}};
    write_text((out_dir(gl) / "stability.json").string(), j.dump(2) + "\n");
    print(j);
    return kExitOk;
}

int cmd_asymptotic(const Globals& gl) {
    const RunConfig cfg = resolve(gl);
    const Grid g(cfg.n);
    const Parameters p = cfg.parameters();
    AsymptoticBundle b = build_first_order(g, p, cfg.newton);
    if (cfg.asymptotic_order == 2) {
        build_second_order(g, b);
        if (!b.gamma) {
            print({{"converged", false}, {"message", b.second_order_report.message}});
            return kExitNoConvergence;
        }
    }
    const State s = composite_state(g, b, p.L2, cfg.asymptotic_order);
    StateSnapshot snap{p, s, {}};
    snap.meta.label = to_string(classify(g, s, p));
    snap.meta.residual = assemble_residual(g, s, p).lpNorm<Eigen::Infinity>();
    const fs::path dir = out_dir(gl);
    write_snapshot((dir / "asymptotic.json").string(), snap);
    const int c = g.centre();
    json j = {{"order", cfg.asymptotic_order},
              {"allen_cahn_iterations", b.q_report.iterations},
              {"max_abs_g", b.g.max_abs()},
              {"h_centre", b.h(c, c)},
              {"h0_series_centre", eval_h0(0.0, 0.0, p.s_plus, cfg.series_terms)},
              {"composite_residual", snap.meta.residual}};
    if (b.gamma) j["gamma_diagonal_sign_changes"] = diagonal_sign_changes(g, *b.gamma, 1e-8 * b.gamma->max_abs());
    print(j);
    return kExitOk;
}

int cmd_limits(const Globals& gl) {
    const RunConfig cfg = resolve(gl);
    const Parameters p = cfg.parameters();
    GeodesicOptions go;
    go.segments = cfg.geodesic_segments;
    const GeodesicResult geo = transition_cost(p, go);
    const double edge = 2.0;
    json j = {{"s1", series_s1()},
              {"s2", series_s2()},
              {"c1", geo.c1},
              {"epsilon", p.epsilon},
              {"L2", p.L2},
              {"edge_length", edge},
              {"L2_star", critical_L2(p.epsilon, geo.c1, p.s_plus, edge)},
              {"J_infty_D", J_infty_closed(ThetaBoundary::D, p.epsilon, p.L2, p.s_plus, edge)},
              {"J_infty_R", J_infty_closed(ThetaBoundary::R, p.epsilon, p.L2, p.s_plus, edge)},
              {"G_infty_constant", G_infty_constant(geo.c1)}};
    write_text((out_dir(gl) / "limits.json").string(), j.dump(2) + "\n");
    print(j);
    return kExitOk;
}

int cmd_geodesic(const Globals& gl) {
    const RunConfig cfg = resolve(gl);
    const Parameters p = cfg.parameters();
    GeodesicOptions go;
    go.segments = cfg.geodesic_segments;
    const GeodesicResult e = transition_cost(p, go);
    go.metric = PathMetric::q_norm;
    const GeodesicResult q = transition_cost(p, go);
    constexpr double reference = 41.6817;
    json j = {{"c1_euclidean", e.c1},
              {"c1_q_norm", q.c1},
              {"length_euclidean", e.length},
              {"straight_line_euclidean", e.straight_line},
              {"iterations", e.iterations},
              {"converged", e.converged && q.converged},
              {"reference", reference},
              {"relative_error_euclidean", std::abs(e.c1 - reference) / reference},
              {"relative_error_q_norm", std::abs(q.c1 - reference) / reference}};
    const fs::path dir = out_dir(gl);
    std::string csv = "t,q1,q2,q3\n";
    for (std::size_t k = 0; k < e.path.size(); ++k) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                      double(k) / double(e.path.size() - 1), e.path[k][0], e.path[k][1], e.path[k][2]);
        csv += buf;
    }
    write_text((dir / "geodesic_path.csv").string(), csv);
    write_text((dir / "geodesic.json").string(), j.dump(2) + "\n");
    print(j);
    return (e.converged && q.converged) ? kExitOk : kExitNoConvergence;
}

int cmd_render(const Globals& gl, const std::string& snapshot_path, std::optional<std::string> quantity) {
    const RunConfig cfg = resolve(gl);
    const std::string qname = quantity ? *quantity : cfg.render_quantity;
    const RenderQuantity q = render_quantity_from_string(qname);
    const StateSnapshot snap = read_snapshot(snapshot_path);
    const Image img = render(snap, q, cfg.render_scale, cfg.render_stride);
    const fs::path file = out_dir(gl) / (qname + ".ppm");
    write_text(file.string(), img.to_ppm());
    std::cout << file.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced Landau-de Gennes solver on a square with tangent boundary conditions"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals gl;
    app.add_option("--config", gl.config, "key = value configuration file");
    app.add_option("--out", gl.out, "output directory");
    app.add_option("--grid-n", gl.grid_n, "nodes per side (odd, >= 17)");
    app.add_option("--seed", gl.seed, "seed kind: wors, ring_plus, ring_minus, pwors, constant, d, r");
    app.add_option("--lambda-bar-sq", gl.lambda_bar_sq, "rescaled domain size");
    app.add_option("--L2", gl.L2, "elastic anisotropy");

    bool no_stability = false;
    std::string snapshot;
    std::optional<std::string> quantity;
    auto* solve = app.add_subcommand("solve", "Newton solve from a seed; writes snapshot.json and report.json");
    solve->add_flag("--no-stability", no_stability, "skip the eigenvalue computation");
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter continuation; one CSV per seed plus manifest.json");
    auto* stab = app.add_subcommand("stability", "smallest Hessian eigenvalues of a snapshot");
    stab->add_option("--snapshot", snapshot, "snapshot JSON")->required();
    auto* asym = app.add_subcommand("asymptotic", "asymptotic fields and composite state");
    auto* lim = app.add_subcommand("limits", "limiting energies and critical anisotropy");
    auto* geo = app.add_subcommand("geodesic", "transition cost between the bulk wells");
    auto* rend = app.add_subcommand("render", "PPM image of a snapshot field");
    rend->add_option("--snapshot", snapshot, "snapshot JSON")->required();
    rend->add_option("--quantity", quantity, "q1, q2, q3, s_sq or director_overlay");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*solve) return cmd_solve(gl, !no_stability);
        if (*sweep_cmd) return cmd_sweep(gl);
        if (*stab) return cmd_stability(gl, snapshot);
        if (*asym) return cmd_asymptotic(gl);
        if (*lim) return cmd_limits(gl);
        if (*geo) return cmd_geodesic(gl);
        if (*rend) return cmd_render(gl, snapshot, quantity);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    return kExitConfig;
}
