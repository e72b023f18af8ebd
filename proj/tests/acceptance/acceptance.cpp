// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pesym/cli/cli.hpp"
#include "pesym/common/keyvalue.hpp"
#include "pesym/equimap/equimap.hpp"
#include "pesym/fbsolve/fbsolve.hpp"
#include "pesym/liealg/verify.hpp"
#include "pesym/simred/ode.hpp"
#include "pesym/simred/simred.hpp"

namespace fs = std::filesystem;
namespace la = pesym::liealg;
namespace em = pesym::equimap;
namespace sr = pesym::simred;
namespace fb = pesym::fbsolve;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Shared by criteria 1 and 2.
std::vector<la::EntryReport> g_reports;

Outcome catalog_verification() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto cat = la::load_catalog(PESYM_CATALOG_DIR);
    o.require(cat.size() == 35, "expected 35 entries, found " + std::to_string(cat.size()));
    la::VerifyOptions opt;  // 2 instantiations, 3 stand-ins, 12 points, tol 1e-9
    int listed = 0, controls = 0, printed = 0, perturbed = 0, entries_ok = 0;
    double weakest_control = INFINITY;
    for (const auto& e : cat) {
        auto rep = la::verify_catalog_entry(e, opt);
        bool has_perturbed = false;
        for (const auto& inst : rep.instantiations)
            for (const auto& r : inst.records) {
                if (r.expected_pass) {
                    ++listed;
                    o.require(r.invariance_zero, rep.id + " listed generator " + r.text);
                } else if (r.kind == la::GeneratorRecord::Kind::Printed) {
                    // A printed variant only has to fail somewhere: its difference from the
                    // corrected generator can vanish for particular stand-ins.
                    ++printed;
                    o.require(!r.invariance_zero, rep.id + " printed variant " + r.text);
                } else {
                    ++controls;
                    weakest_control = std::min(weakest_control, r.min_failure);
                    o.require(!r.invariance_zero && r.min_failure > 1e-3, rep.id + " control " + r.text);
                    has_perturbed = true;
                }
            }
        o.require(rep.instantiations.size() >= 2, rep.id + " needs two instantiations");
        o.require(has_perturbed, rep.id + " has no negative control");
        perturbed += has_perturbed ? 1 : 0;
        entries_ok += rep.listed_pass() && rep.negatives_fail() ? 1 : 0;
        g_reports.push_back(std::move(rep));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "runtime " + fmt(secs) + " s");
    o.note(std::to_string(entries_ok) + "/" + std::to_string(cat.size()) + " entries, " + std::to_string(listed) +
           " generator checks, " + std::to_string(controls) + " controls (weakest " + fmt(weakest_control) + "), " +
           std::to_string(printed) + " printed variants failing, " + fmt(secs) + " s");
    o.require(perturbed == 35, "entries with a negative control: " + std::to_string(perturbed));
    return o;
}

Outcome determining_agreement() {
    Outcome o;
    o.require(!g_reports.empty(), "catalog reports missing");
    int checked = 0;
    for (const auto& rep : g_reports)
        for (const auto& inst : rep.instantiations)
            for (const auto& r : inst.records) {
                if (!r.expected_pass || !r.determining_zero) continue;
                ++checked;
                o.require(*r.determining_zero, rep.id + " determining equations for " + r.text);
                o.require(r.agreement.value_or(false), rep.id + " disagreement for " + r.text);
            }
    o.require(checked > 0, "no pair with non-constant diffusivity was checked");
    o.note(std::to_string(checked) + " (system, generator) pairs, all eight equations, agreement exact");
    return o;
}

Outcome transformation_verification() {
    Outcome o;
    const auto cat = la::load_catalog(PESYM_CATALOG_DIR);
    const auto rows = em::load_reductions(PESYM_CATALOG_DIR);
    std::set<int> t3, t4;
    double worst_push = 0, worst_fp = 0;
    for (const auto& r : rows) {
        (r.table == 3 ? t3 : t4).insert(r.case_number);
        const auto rep = em::verify_reduction(r, cat);
        o.require(rep.ok(), rep.id + " onto " + rep.target);
        for (const auto& rec : rep.records) {
            worst_push = std::max(worst_push, rec.push_worst);
            worst_fp = std::max(worst_fp, rec.constraints_worst);
        }
    }
    o.require(t3.size() == 8, "Table 3 rows: " + std::to_string(t3.size()));
    o.require(t4.size() == 14, "Table 4 rows: " + std::to_string(t4.size()));
    o.require(worst_push < 1e-9, "push residual " + fmt(worst_push));

    const auto sc = em::check_equivalence_scalings(20240603, 8, 1e-10);
    for (const auto& c : sc) {
        const bool holds = c.constraints_zero && c.push_zero;
        if (c.scaling == em::GScaling::Derived) {
            o.require(holds, "equivalence maps with G scaled by a7/a3^2");
        } else {
            std::string failed;
            for (int k : c.failed_constraints) failed += (failed.empty() ? "" : ",") + std::to_string(k);
            o.require(!holds, "printed scaling a7/a3 unexpectedly consistent");
            o.note("G scaling: a7/a3^2 satisfies all constraints to 1e-10; printed a7/a3 violates constraint " + failed);
        }
    }
    o.note(std::to_string(rows.size()) + " row files (" + std::to_string(t3.size()) + " + " +
           std::to_string(t4.size()) + " rows), worst push " + fmt(worst_push) + ", worst constraint " + fmt(worst_fp));
    return o;
}

sr::ModelParams model(double m, int n) {
    sr::ModelParams p;
    p.m = m;
    p.n = n;
    return p;
}

Outcome exact_residuals() {
    Outcome o;
    double worst = 0, worst_bc = 0;
    for (int n : {0, 1, 2})
        for (double m : {0.0, 0.5, 1.0}) {
            const auto p = model(m, n);
            std::vector<std::pair<sr::Source, sr::Source>> sources{{sr::exact_f(p), sr::exact_g(p)}};
            if (m == 0.0 && n == 0) sources.emplace_back([p](double phi) { return sr::f_cubic(phi, p); }, sr::exact_g(p));
            for (const auto& [f, g] : sources)
                for (int i = 0; i < 200; ++i) {
                    const auto r = sr::reduced_residuals(sr::exact_point(p.omega0 * i / 200.0, p), p, f, g);
                    worst = std::max({worst, std::fabs(r.r1), std::fabs(r.r2)});
                }
            const auto front = sr::exact_point(p.omega0, p);
            worst_bc = std::max({worst_bc, std::fabs(front.phi), std::fabs(front.psi),
                                 std::fabs(front.dphi + p.amplitude() * p.omega0 / 2.0)});
        }
    o.require(worst < 1e-11, "residual " + fmt(worst));
    o.require(worst_bc <= 1e-12, "boundary conditions " + fmt(worst_bc));
    o.note("max residual " + fmt(worst) + ", boundary conditions " + fmt(worst_bc));
    return o;
}

Outcome shooting_recovery() {
    Outcome o;
    for (int n : {0, 2})
        for (double m : {0.0, 1.0}) {
            const auto p = model(m, n);
            const auto t0 = Clock::now();
            sr::ShootGuess guess{1.03 * sr::exact_phi(0, p), 0.97 * sr::exact_psi(0, p), 1.03};
            const auto res = sr::shoot_reduced(p, sr::exact_f(p), sr::exact_g(p), guess);
            const double secs = seconds_since(t0);
            double err = 0;
            for (std::size_t i = 0; i < res.profile.omega.size(); ++i) {
                const double w = std::min(res.profile.omega[i], p.omega0);
                err = std::max({err, std::fabs(res.profile.phi[i] - sr::exact_phi(w, p)),
                                std::fabs(res.profile.psi[i] - sr::exact_psi(w, p))});
            }
            const std::string tag = "n=" + std::to_string(n) + " m=" + fmt(m);
            o.require(std::fabs(res.omega0 - 1.0) < 1e-6, tag + " front " + fmt(res.omega0));
            o.require(err < 1e-6, tag + " profile error " + fmt(err));
            o.require(secs < 5.0, tag + " runtime " + fmt(secs) + " s");
            o.note(tag + ": |omega0-1| " + fmt(std::fabs(res.omega0 - 1.0)) + ", profile " + fmt(err) + ", " +
                   fmt(secs) + " s");
        }
    return o;
}

Outcome pde_convergence() {
    Outcome o;
    for (int n : {0, 2}) {
        const auto p = model(1.0, n);
        fb::SolverConfig cfg;
        cfg.t0 = 1.0;
        cfg.t_end = 2.0;
        cfg.sources = fb::exact_sources(p);
        const auto t0 = Clock::now();
        const auto ladder = fb::convergence_ladder(p, cfg, {100, 200, 400});
        const double secs = seconds_since(t0);
        const auto& fine = ladder.back();
        const std::string tag = "n=" + std::to_string(n);
        o.require(std::fabs(fine.t_final - 2.0) < 1e-12, tag + " final time " + fmt(fine.t_final));
        o.require(fine.err_front < 1e-3, tag + " |s(2)-sqrt2| " + fmt(fine.err_front));
        o.require(fine.err_alpha_sup < 1e-3, tag + " alpha error " + fmt(fine.err_alpha_sup));
        std::string orders;
        for (std::size_t k = 1; k < ladder.size(); ++k) {
            const double q = *ladder[k].observed_order;
            o.require(q >= 1.8 && q <= 2.2, tag + " order " + fmt(q));
            orders += (k > 1 ? "/" : "") + fmt(q);
        }
        o.require(secs < 120.0, tag + " runtime " + fmt(secs) + " s");
        o.note(tag + ": |s(2)-sqrt2| " + fmt(fine.err_front) + ", alpha error " + fmt(fine.err_alpha_sup) +
               ", orders " + orders + ", " + fmt(secs) + " s");
    }
    return o;
}

/// Rows of a CSV written by the CLI, skipping manifest lines and the header.
std::vector<std::vector<double>> read_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : pesym::split(line, ',')) row.push_back(pesym::parse_double(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

Outcome figure_claims() {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "pesym_acceptance_figures";
    fs::remove_all(dir);
    std::ostringstream sink;
    for (const char* which : {"1", "2", "3", "5"})
        o.require(pesym::cli::run({"figures", which, "--out-dir", dir.string()}, sink, sink) == 0,
                  std::string("figures ") + which);
    const std::map<int, double> ms{{1, 1.0}, {2, 0.5}, {3, 0.0}};
    for (const auto& [fig, m] : ms) {
        const auto p = model(m, 0);
        const std::string stem = (dir / ("fig" + std::to_string(fig))).string();
        const auto A = read_csv(stem + "_alpha.csv"), C = read_csv(stem + "_c.csv"), R = read_csv(stem + "_front.csv");
        const double peak = p.alpha_s + std::pow(p.alpha_s, 1 - m) * p.omega0 * p.omega0 / 4;
        std::map<double, std::vector<std::size_t>> levels;
        for (std::size_t i = 0; i < A.size(); ++i) levels[A[i][0]].push_back(i);
        double peak_err = 0, front_c_err = 0, R_err = 0;
        bool alpha_max_at_0 = true, c_min_at_0 = true;
        for (const auto& [t, idx] : levels) {
            const double front = p.omega0 * std::sqrt(t);
            peak_err = std::max(peak_err, std::fabs(A[idx.front()][2] - peak));
            for (std::size_t i : idx) {
                alpha_max_at_0 = alpha_max_at_0 && A[i][2] <= A[idx.front()][2];
                c_min_at_0 = c_min_at_0 && C[i][2] >= C[idx.front()][2];
                if (A[i][1] >= front) front_c_err = std::max(front_c_err, std::fabs(C[i][2] - p.c_inf));
            }
            front_c_err = std::max(front_c_err, std::fabs(sr::exact_fields(t, front, p).c - p.c_inf));
        }
        for (const auto& row : R) R_err = std::max(R_err, std::fabs(row[1] - p.omega0 * std::sqrt(row[0])));
        const std::string tag = "figure " + std::to_string(fig);
        o.require(alpha_max_at_0, tag + " alpha maximum away from r = 0");
        o.require(peak_err < 1e-12, tag + " peak " + fmt(peak_err));
        o.require(c_min_at_0, tag + " c minimum away from r = 0");
        o.require(front_c_err < 1e-12, tag + " c at the front " + fmt(front_c_err));
        o.require(R_err < 1e-12, tag + " front " + fmt(R_err));
        o.note(tag + ": peak alpha " + fmt(peak) + " at r = 0, c = c_inf at the front, R = omega0 sqrt(t)");
    }
    const auto F = read_csv(dir / "fig5_f.csv");
    std::map<double, std::vector<std::pair<double, double>>> curves;
    for (const auto& row : F) curves[row[0]].emplace_back(row[1], row[2]);
    o.require(curves.size() == 3, "figure 5 has three curves");
    for (const auto& [m, pts] : curves) {
        o.require(pts.front().first == 0.0 && pts.front().second == 0.0, "figure 5 m=" + fmt(m) + " passes (0,0)");
        for (std::size_t i = 1; i < pts.size(); ++i)
            o.require(pts[i].second > pts[i - 1].second, "figure 5 m=" + fmt(m) + " increasing");
    }
    const auto p3 = model(0.0, 0);
    const double a1 = sr::cubic_root1(p3), a2 = sr::cubic_root2(p3);
    o.require(std::fabs(a1) < 1e-15, "alpha1 " + fmt(a1));
    o.require(std::fabs(a2 - 0.875) < 1e-15, "alpha2 " + fmt(a2));
    double cubic_err = 0;
    for (const auto& [phi, f] : curves[0.0]) cubic_err = std::max(cubic_err, std::fabs(f - sr::f_cubic(phi, p3)));
    o.require(cubic_err < 1e-14, "m = 0 curve against the cubic " + fmt(cubic_err));
    o.note("figure 5: three increasing curves through (0,0); alpha1 = " + fmt(a1) + ", alpha2 = " + fmt(a2));
    fs::remove_all(dir);
    return o;
}

// Criterion 8. A travelling wave U = u(x - c t), V = v(x - c t) of the exponential-coupling
// system is computed by integrating its ODEs numerically. It is then moved along a
// generator to first order, U + eps Q_U, and the PDE residual is measured.
// For a symmetry the first-order term vanishes and the residual is O(eps^2).
struct FlowModel {
    double c = 0.5;
    static double D(double u) { return 1.0 + 0.5 * u * u; }
    static double dD(double u) { return u; }
    static double f(double u) { return 0.3 - 0.4 * u; }
    static double g(double u) { return 0.5 + 0.2 * u; }

    /// (u, u', v, v') at z >= 0 from u = 1, D u' = 0.3, v = 0, v' = 0.2.
    std::array<double, 4> profile(double z) const {
        sr::State y{1.0, 0.3, 0.0, 0.2};
        const double wave = c;
        if (z > 0) {
            const sr::Rhs rhs = [wave](double, const sr::State& s, sr::State& d) {
                const double Du = D(s[0]);
                d[0] = s[1] / Du;
                d[1] = -wave * s[1] / Du - std::exp(s[2]) * f(s[0]);
                d[2] = s[3];
                d[3] = -std::exp(s[2]) * g(s[0]);
            };
            sr::Rk45Options opt;
            opt.rtol = 1e-13;
            opt.atol = 1e-15;
            y = sr::integrate_rk45(rhs, y, 0.0, z, opt).y;
        }
        return {y[0], y[1] / D(y[0]), y[2], y[3]};
    }
};

struct Transported {
    double U, V;
};

/// U, V moved to first order along xi0 d_t + xi1 d_x + eta1 d_U + eta2 d_V, with
/// xi0 = a t, xi1 = b x and constant eta (the scaling family of this system).
Transported transport(const FlowModel& w, double t, double x, double eps, double a, double b, double eta2) {
    const auto s = w.profile(x - w.c * t);
    const double Ut = -w.c * s[1], Ux = s[1], Vt = -w.c * s[3], Vx = s[3];
    return {s[0] + eps * (-a * t * Ut - b * x * Ux), s[2] + eps * (eta2 - a * t * Vt - b * x * Vx)};
}

std::vector<double> flow_residuals(const FlowModel& w, double eps, double a, double b, double eta2) {
    const double h = 2e-3;
    std::vector<double> out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double t = 1.0 + 0.25 * i, x = 0.3 + w.c * t + 0.2 * j;
            auto at = [&](double dt, double dx) { return transport(w, t + dt, x + dx, eps, a, b, eta2); };
            const auto c0 = at(0, 0), xp = at(0, h), xm = at(0, -h), tp = at(h, 0), tm = at(-h, 0);
            const double Ut = (tp.U - tm.U) / (2 * h);
            const double Ux = (xp.U - xm.U) / (2 * h), Uxx = (xp.U - 2 * c0.U + xm.U) / (h * h);
            const double Vxx = (xp.V - 2 * c0.V + xm.V) / (h * h);
            const double r1 = Ut - FlowModel::D(c0.U) * Uxx - FlowModel::dD(c0.U) * Ux * Ux -
                              std::exp(c0.V) * FlowModel::f(c0.U);
            const double r2 = Vxx + std::exp(c0.V) * FlowModel::g(c0.U);
            out.push_back(r1);
            out.push_back(r2);
        }
    return out;
}

/// Largest change of the residual relative to the untransported solution, which
/// removes the discretisation error of the finite differences.
double flow_change(const FlowModel& w, const std::vector<double>& base, double eps, double a, double b, double eta2) {
    const auto r = flow_residuals(w, eps, a, b, eta2);
    double worst = 0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::fabs(r[i] - base[i]));
    return worst;
}

Outcome flow_oracle() {
    Outcome o;
    const FlowModel w;
    const auto base = flow_residuals(w, 0.0, 0, 0, 0);
    double base_max = 0;
    for (double r : base) base_max = std::max(base_max, std::fabs(r));
    auto exponent = [&](double a, double b, double eta2) {
        return std::log2(flow_change(w, base, 0.01, a, b, eta2) / flow_change(w, base, 0.005, a, b, eta2));
    };
    const double sym = exponent(2.0, 1.0, -2.0);   // 2t d_t + x d_x - 2 d_V, a listed generator
    const double ctrl = exponent(2.0, 1.0, -3.0);  // the negative control, not a symmetry
    o.require(sym >= 1.9, "symmetry exponent " + fmt(sym));
    o.require(ctrl < 1.5, "control exponent " + fmt(ctrl));
    o.note("residual of the numerical wave " + fmt(base_max) + ", exponent along the scaling generator " + fmt(sym) +
           ", along the control " + fmt(ctrl));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"catalog verification", catalog_verification},
        {"determining-equation cross-check", determining_agreement},
        {"transformation verification", transformation_verification},
        {"exact-solution residuals", exact_residuals},
        {"shooting recovery", shooting_recovery},
        {"PDE solver convergence", pde_convergence},
        {"figure reproduction", figure_claims},
        {"symmetry-flow oracle", flow_oracle},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k + 1 << ": " << criteria[k].first << " ("
                  << fmt(seconds_since(t0)) << " s)\n";
        for (const auto& n : o.notes) std::cout << "      " << n << '\n';
        std::cout.flush();
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << '\n';
    return failures == 0 ? 0 : 1;
}
