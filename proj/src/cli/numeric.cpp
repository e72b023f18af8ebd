#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "commands.hpp"
#include "pesym/common/keyvalue.hpp"
#include "pesym/fbsolve/fbsolve.hpp"

namespace pesym::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using simred::ModelParams;

constexpr double kResidualTol = 1e-11;
constexpr double kBoundaryTol = 1e-12;
constexpr double kShootTol = 1e-6;

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::pair<simred::Source, simred::Source> profile_sources(const ModelParams& p, bool cubic) {
    if (!cubic) return {simred::exact_f(p), simred::exact_g(p)};
    if (p.m != 0.0) throw UsageError("--cubic needs m = 0");
    return {[p](double phi) { return simred::f_cubic(phi, p); }, simred::exact_g(p)};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

int reduce_exact(const ModelParams& p, int points, bool cubic, const RunManifest& manifest, const fs::path& dir,
                 std::ostream& out) {
    const auto [f, g] = profile_sources(p, cubic);
    auto csv = open_output(dir, "reduce_profile.csv");
    manifest.write_header(csv);
    csv << "omega,phi,psi,dphi,dpsi,r1,r2\n";
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double w = p.omega0 * i / points;
        const auto pt = simred::exact_point(w, p);
        const auto r = simred::reduced_residuals(pt, p, f, g);
        worst = std::max({worst, std::fabs(r.r1), std::fabs(r.r2)});
        csv << w << ',' << pt.phi << ',' << pt.psi << ',' << pt.dphi << ',' << pt.dpsi << ',' << r.r1 << ',' << r.r2
            << '\n';
    }
    const auto front = simred::exact_point(p.omega0, p);
    csv << p.omega0 << ',' << front.phi << ',' << front.psi << ',' << front.dphi << ',' << front.dpsi << ",,\n";

    const double bc_phi = std::fabs(front.phi), bc_psi = std::fabs(front.psi);
    const double bc_slope = std::fabs(front.dphi + p.amplitude() * p.omega0 / 2.0);
    const bool pass = worst < kResidualTol && std::max({bc_phi, bc_psi, bc_slope}) <= kBoundaryTol;
    json report{{"mode", "exact"},
                {"points", points},
                {"source", cubic ? "cubic" : "closed-form"},
                {"max_residual", worst},
                {"residual_tol", kResidualTol},
                {"bc_phi", bc_phi},
                {"bc_psi", bc_psi},
                {"bc_front_slope", bc_slope},
                {"bc_tol", kBoundaryTol},
                {"pass", pass},
                {"manifest", manifest.to_json()}};
    auto rep = open_output(dir, "reduce_report.json");
    write_json(rep, report);
    write_json(out, report);
    return pass ? ExitPass : ExitFailure;
}

int reduce_shoot(const ModelParams& p, int points, bool cubic, const simred::ShootGuess& guess,
                 const RunManifest& manifest, const fs::path& dir, std::ostream& out) {
    const auto [f, g] = profile_sources(p, cubic);
    simred::ShootOptions opt;
    opt.profile_points = points + 1;
    const auto res = simred::shoot_reduced(p, f, g, guess, opt);
    auto csv = open_output(dir, "reduce_profile.csv");
    manifest.write_header(csv);
    csv << "omega,phi,psi,dphi,dpsi,phi_exact,psi_exact\n";
    double err = 0.0;
    const auto& pr = res.profile;
    for (std::size_t i = 0; i < pr.omega.size(); ++i) {
        const double w = std::min(pr.omega[i], p.omega0);
        const double pe = simred::exact_phi(w, p), se = simred::exact_psi(w, p);
        err = std::max({err, std::fabs(pr.phi[i] - pe), std::fabs(pr.psi[i] - se)});
        csv << pr.omega[i] << ',' << pr.phi[i] << ',' << pr.psi[i] << ',' << pr.dphi[i] << ',' << pr.dpsi[i] << ','
            << pe << ',' << se << '\n';
    }
    const double front_err = std::fabs(res.omega0 - p.omega0);
    const bool pass = front_err < kShootTol && err < kShootTol;
    json report{{"mode", "shoot"},
                {"source", cubic ? "cubic" : "closed-form"},
                {"omega0", res.omega0},
                {"phi0", res.phi0},
                {"psi0", res.psi0},
                {"defect", res.defect},
                {"iterations", res.iterations},
                {"omega0_error", front_err},
                {"profile_error_sup", err},
                {"tol", kShootTol},
                {"pass", pass},
                {"manifest", manifest.to_json()}};
    auto rep = open_output(dir, "reduce_report.json");
    write_json(rep, report);
    write_json(out, report);
    return pass ? ExitPass : ExitFailure;
}

json error_json(const fbsolve::ErrorReport& e) {
    return json{{"N", e.N},
                {"t_final", e.t_final},
                {"err_alpha_sup", e.err_alpha_sup},
                {"err_c_sup", e.err_c_sup},
                {"err_front", e.err_front},
                {"observed_order", e.observed_order ? json(*e.observed_order) : json()}};
}

std::vector<int> parse_ladder(const std::string& text) {
    std::vector<int> Ns;
    for (const auto& part : split(text, ',')) {
        const double v = parse_double(part);
        if (v != std::floor(v) || v < 16) throw UsageError("ladder sizes must be integers of at least 16");
        Ns.push_back(static_cast<int>(v));
    }
    if (Ns.size() < 2) throw UsageError("a ladder needs at least two grid sizes");
    return Ns;
}

/// Closed-form alpha and c, continued by the far field outside the front.
simred::Fields fields_or_far(double t, double x, const ModelParams& p) {
    const double R = p.omega0 * std::sqrt(t);
    if (x >= R) return {p.alpha_s, p.c_inf, R};
    return simred::exact_fields(t, x, p);
}

double level(double a, double b, int k, int count) { return a + (b - a) * k / (count - 1); }

}  // namespace

int cmd_reduce(const ReduceCmd& c, std::ostream& out, std::ostream&) {
    RunManifest manifest("reduce");
    auto keys = model_keys();
    keys.insert({"mode", "points", "cubic"});
    Settings s(manifest, c.common.config, keys);
    const auto p = resolve_model(s, c.model);
    const std::string mode = s.text("mode", c.mode, "exact");
    if (mode != "exact" && mode != "shoot") throw UsageError("mode must be exact or shoot");
    const int points = s.integer("points", c.points, 200);
    if (points < 2) throw UsageError("points must be at least 2");
    const bool cubic = s.text("cubic", c.cubic ? std::optional<std::string>("yes") : std::nullopt, "no") == "yes";
    p.require_closed_form();
    if (mode == "exact") return reduce_exact(p, points, cubic, manifest, c.out_dir, out);

    simred::ShootGuess guess;
    guess.phi0 = c.guess_phi0.value_or(1.03 * simred::exact_phi(0.0, p));
    guess.psi0 = c.guess_psi0.value_or(1.03 * simred::exact_psi(0.0, p));
    guess.omega0 = c.guess_omega0.value_or(1.03 * p.omega0);
    manifest.set("guess_phi0", guess.phi0);
    manifest.set("guess_psi0", guess.psi0);
    manifest.set("guess_omega0", guess.omega0);
    return reduce_shoot(p, points, cubic, guess, manifest, c.out_dir, out);
}

int cmd_simulate(const SimulateCmd& c, std::ostream& out, std::ostream& err) {
    RunManifest manifest("simulate");
    auto keys = model_keys();
    keys.insert({"N", "sigma", "t0", "t_end", "output_every", "source", "S", "Q", "ladder"});
    Settings s(manifest, c.common.config, keys);
    const auto p = resolve_model(s, c.model);
    fbsolve::SolverConfig cfg;
    cfg.N = s.integer("N", c.N, cfg.N);
    cfg.sigma = s.number("sigma", c.sigma, cfg.sigma);
    cfg.t0 = s.number("t0", c.t0, cfg.t0);
    cfg.t_end = s.number("t_end", c.t_end, cfg.t_end);
    cfg.output_every = s.number("output_every", c.output_every, cfg.output_every);
    const std::string source = s.text("source", c.source, "exact");
    if (source == "exact" || source == "cubic") {
        if (c.S || c.Q) throw UsageError("--S and --Q need --source expr");
        if (source == "cubic" && p.m != 0.0) throw UsageError("the cubic source needs m = 0");
        cfg.sources = fbsolve::exact_sources(p, source == "cubic");
    } else if (source == "expr") {
        const auto S = s.text("S", c.S), Q = s.text("Q", c.Q);
        if (!S || !Q) throw UsageError("--source expr needs both --S and --Q");
        cfg.sources = fbsolve::parsed_sources(
            *S, *Q,
            {{"alpha_s", p.alpha_s}, {"c_inf", p.c_inf}, {"q0", p.q0}, {"m", p.m}, {"omega0", p.omega0}});
    } else {
        throw UsageError("source must be exact, cubic or expr");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto ladder_text = s.text("ladder", c.ladder);
    const fs::path dir(c.out_dir);

    if (ladder_text) {
        const auto Ns = parse_ladder(*ladder_text);
        if (!cfg.sources.exact_compatible) throw UsageError("a ladder needs the exact or cubic source");
        const auto ladder = fbsolve::convergence_ladder(p, cfg, Ns);
        json rows = json::array();
        for (const auto& e : ladder) rows.push_back(error_json(e));
        json report{{"ladder", rows}, {"manifest", manifest.to_json()}};
        auto f = open_output(dir, "simulate_ladder.json");
        write_json(f, report);
        write_json(out, report);
        return ExitPass;
    }

    const auto res = fbsolve::run(p, cfg);
    auto csv = open_output(dir, "simulate_snapshots.csv");
    manifest.write_header(csv);
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) fbsolve::write_snapshot_csv(csv, res.snapshots[k], p, k == 0);
    json report{{"steps", res.steps},
                {"s_final", res.final_state.s},
                {"sdot_final", res.final_state.sdot},
                {"clipped", res.final_state.clipped},
                {"manifest", manifest.to_json()}};
    if (res.error) {
        report["error"] = error_json(*res.error);
        auto f = open_output(dir, "simulate_error.json");
        write_json(f, error_json(*res.error));
    } else {
        err << "simulate: sources have no closed-form solution, errors not computed\n";
    }
    write_json(out, report);
    return ExitPass;
}

int cmd_figures(const FiguresCmd& c, std::ostream& out, std::ostream&) {
    RunManifest manifest("figures " + std::to_string(c.which));
    auto keys = model_keys();
    keys.insert({"t_min", "t_max", "x_max", "nt", "nx"});
    Settings s(manifest, c.common.config, keys);
    ModelParams defaults;
    if (c.which == 2) defaults.m = 0.5;
    if (c.which == 3 || c.which == 4) defaults.m = 0.0;
    const auto p = resolve_model(s, c.model, defaults);
    const double t_min = s.number("t_min", c.t_min, 0.25);
    const double t_max = s.number("t_max", c.t_max, 3.0);
    const double x_max = s.number("x_max", c.x_max, 2.0);
    const int nt = s.integer("nt", c.nt, 56);
    const int nx = s.integer("nx", c.nx, 81);
    if (!(t_min > 0 && t_max > t_min && x_max > 0) || nt < 2 || nx < 2)
        throw UsageError("figure grids need 0 < t_min < t_max, x_max > 0 and at least two levels");
    const fs::path dir(c.out_dir);
    const std::string stem = "fig" + std::to_string(c.which);
    json summary{{"figure", c.which}, {"manifest", manifest.to_json()}};

    if (c.which <= 3) {
        auto fa = open_output(dir, stem + "_alpha.csv");
        auto fc = open_output(dir, stem + "_c.csv");
        auto fr = open_output(dir, stem + "_front.csv");
        for (auto* f : {&fa, &fc, &fr}) manifest.write_header(*f);
        fa << "t,x,alpha\n";
        fc << "t,x,c\n";
        fr << "t,R\n";
        double amin = INFINITY, amax = -INFINITY, cmin = INFINITY, cmax = -INFINITY;
        for (int k = 0; k < nt; ++k) {
            const double t = level(t_min, t_max, k, nt);
            for (int i = 0; i < nx; ++i) {
                const double x = level(0.0, x_max, i, nx);
                const auto v = fields_or_far(t, x, p);
                fa << t << ',' << x << ',' << v.alpha << '\n';
                fc << t << ',' << x << ',' << v.c << '\n';
                amin = std::min(amin, v.alpha), amax = std::max(amax, v.alpha);
                cmin = std::min(cmin, v.c), cmax = std::max(cmax, v.c);
            }
            fr << t << ',' << p.omega0 * std::sqrt(t) << '\n';
        }
        summary["files"] = {stem + "_alpha.csv", stem + "_c.csv", stem + "_front.csv"};
        summary["alpha_range"] = {amin, amax};
        summary["c_range"] = {cmin, cmax};
    } else if (c.which == 4) {
        const auto f = simred::exact_f(p);
        const auto g = simred::exact_g(p);
        auto fs4 = open_output(dir, stem + "_sources.csv");
        manifest.write_header(fs4);
        fs4 << "t,r,alpha,c,S,Q\n";
        double smin = INFINITY, smax = -INFINITY, qmin = INFINITY, qmax = -INFINITY;
        for (int k = 0; k < nt; ++k) {
            const double t = level(t_min, t_max, k, nt);
            for (int i = 0; i < nx; ++i) {
                // Cell-centred nodes stay clear of the front, where S is a 0/0 limit.
                const double r = p.omega0 * std::sqrt(t) * (i + 0.5) / nx;
                const auto v = simred::exact_fields(t, r, p);
                const double S = simred::source_S(v.alpha, v.c, p, f);
                const double Q = simred::source_Q(v.alpha, v.c, p, g);
                fs4 << t << ',' << r << ',' << v.alpha << ',' << v.c << ',' << S << ',' << Q << '\n';
                smin = std::min(smin, S), smax = std::max(smax, S);
                qmin = std::min(qmin, Q), qmax = std::max(qmax, Q);
            }
        }
        summary["files"] = {stem + "_sources.csv"};
        summary["S_range"] = {number_or_null(smin), number_or_null(smax)};
        summary["Q_range"] = {number_or_null(qmin), number_or_null(qmax)};
    } else {
        auto f5 = open_output(dir, stem + "_f.csv");
        manifest.write_header(f5);
        f5 << "m,phi,f\n";
        json curves = json::array();
        for (double m : {0.0, 0.5, 1.0}) {
            ModelParams q = p;
            q.m = m;
            const double top = simred::phi_max(q);
            bool increasing = true;
            double prev = -INFINITY;
            for (int i = 0; i < nx; ++i) {
                const double phi = level(0.0, top, i, nx);
                const double v = simred::f_of_phi(phi, q);
                increasing = increasing && v > prev;
                prev = v;
                f5 << m << ',' << phi << ',' << v << '\n';
            }
            curves.push_back({{"m", m}, {"phi_max", top}, {"f0", simred::f_of_phi(0.0, q)}, {"increasing", increasing}});
        }
        summary["files"] = {stem + "_f.csv"};
        summary["curves"] = curves;
    }
    write_json(out, summary);
    return ExitPass;
}

}  // namespace pesym::cli
