#include "pesym/fbsolve/fbsolve.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "pesym/symexpr/calculus.hpp"
#include "pesym/symexpr/eval.hpp"
#include "pesym/symexpr/parse.hpp"

namespace pesym::fbsolve {

Sources exact_sources(const ModelParams& p, bool cubic) {
    p.require_closed_form();
    if (cubic && p.m != 0.0) throw std::invalid_argument("the cubic source belongs to m = 0");
    Sources s;
    simred::Source f = cubic ? simred::Source([p](double phi) { return simred::f_cubic(phi, p); }) : simred::exact_f(p);
    const double a = p.alpha_s, cinf = p.c_inf;
    s.S = [a, cinf, f](double alpha, double c) { return f(alpha - a) / (cinf - c); };
    s.Q = [p](double alpha, double) { return p.q0 * (alpha - p.alpha_s); };
    s.q_depends_on_c = false;
    s.exact_compatible = true;
    s.label = cubic ? "exact-cubic" : "exact";
    return s;
}

Sources parsed_sources(const std::string& S, const std::string& Q,
                       const std::vector<std::pair<std::string, double>>& constants) {
    symexpr::Bindings b;
    for (const auto& [name, value] : constants) b[name] = symexpr::num(value);
    const auto es = symexpr::simplify(symexpr::substitute(symexpr::parse(S), b));
    const auto eq = symexpr::simplify(symexpr::substitute(symexpr::parse(Q), b));
    for (const auto& e : {es, eq})
        for (const auto& v : symexpr::free_vars(e))
            if (v != "alpha" && v != "c") throw std::invalid_argument("source depends on unknown symbol " + v);
    Sources s;
    s.S = [es](double alpha, double c) { return symexpr::evaluate(es, {{"alpha", alpha}, {"c", c}}); };
    s.Q = [eq](double alpha, double c) { return symexpr::evaluate(eq, {{"alpha", alpha}, {"c", c}}); };
    s.q_depends_on_c = symexpr::depends_on(eq, "c");
    s.label = "S = " + S + "; Q = " + Q;
    return s;
}

Sources zero_sources() {
    Sources s;
    s.S = [](double, double) { return 0.0; };
    s.Q = [](double, double) { return 0.0; };
    s.q_depends_on_c = false;
    s.label = "zero";
    return s;
}

void SolverConfig::validate() const {
    if (N < 16) throw std::invalid_argument("N must be at least 16");
    if (!(sigma > 0 && sigma <= 0.5)) throw std::invalid_argument("sigma must lie in (0, 0.5]");
    if (!(t0 > 0)) throw std::invalid_argument("t0 must be positive");
    if (!(t_end >= t0)) throw std::invalid_argument("t_end must not precede t0");
    if (!(output_every >= 0)) throw std::invalid_argument("output_every must be nonnegative");
    if (!sources.S || !sources.Q) throw std::invalid_argument("sources are not set");
}

FrontFixedState init_from_exact(double t0, const ModelParams& p, const SolverConfig& cfg) {
    p.require_closed_form();
    if (!(t0 > 0)) throw std::invalid_argument("initial time must be positive");
    FrontFixedState st;
    st.t = t0;
    st.s = p.omega0 * std::sqrt(t0);
    st.U.resize(static_cast<std::size_t>(cfg.N) + 1);
    st.V.resize(static_cast<std::size_t>(cfg.N) + 1);
    for (int i = 0; i <= cfg.N; ++i) {
        const double w = p.omega0 * i / cfg.N;
        st.U[static_cast<std::size_t>(i)] = i == cfg.N ? 0.0 : simred::exact_phi(w, p);
        st.V[static_cast<std::size_t>(i)] = i == cfg.N ? 0.0 : t0 * simred::exact_psi(w, p);
    }
    st.sdot = front_speed(st, p);
    return st;
}

namespace {

/// Thomas algorithm; a is the sub-diagonal (a[0] unused), c the super-diagonal.
std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (b[i - 1] == 0.0) throw SolverError("singular tridiagonal system");
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    if (b[n - 1] == 0.0) throw SolverError("singular tridiagonal system");
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    return x;
}

/// Face area y_{i -/+ 1/2}^n over the mean of y^n across the control volume of node i,
/// so the radial operator stays conservative and second order next to the origin.
inline double radial_weight(int i, double half, int n) {
    const double face = i + half;
    if (n == 0) return 1.0;
    if (n == 1) return face / i;
    return face * face / (static_cast<double>(i) * i + 1.0 / 12.0);
}

inline double diffusivity(double U, const ModelParams& p) {
    const double b = std::max(U, 0.0) + p.alpha_s;
    return p.m == 0.0 ? 1.0 : (p.m == 1.0 ? b : std::pow(b, p.m));
}

/// Time derivative of U at every node (zero at the front node) and the front speed.
std::vector<double> rates(const FrontFixedState& st, const ModelParams& p, const SolverConfig& cfg, double& sdot) {
    const int N = st.N();
    const double dy = 1.0 / N, s2 = st.s * st.s;
    sdot = front_speed(st, p);
    std::vector<double> D(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) D[static_cast<std::size_t>(i)] = diffusivity(st.U[static_cast<std::size_t>(i)], p);
    std::vector<double> out(static_cast<std::size_t>(N) + 1, 0.0);
    const auto& U = st.U;
    for (int i = 0; i < N; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double diff;
        if (i == 0) {
            const double Dh = 0.5 * (D[0] + D[1]);
            diff = 2.0 * (p.n + 1) * Dh * (U[1] - U[0]) / (dy * dy);
        } else {
            const double Dp = 0.5 * (D[k] + D[k + 1]), Dm = 0.5 * (D[k] + D[k - 1]);
            diff = (radial_weight(i, 0.5, p.n) * Dp * (U[k + 1] - U[k]) -
                    radial_weight(i, -0.5, p.n) * Dm * (U[k] - U[k - 1])) /
                   (dy * dy);
        }
        double adv = 0.0;
        if (i > 0) {
            const double a = st.y(i) * sdot / st.s;
            double Uy;
            if (a >= 0 && i + 2 <= N)
                Uy = (-3.0 * U[k] + 4.0 * U[k + 1] - U[k + 2]) / (2 * dy);
            else if (a < 0 && i >= 2)
                Uy = (3.0 * U[k] - 4.0 * U[k - 1] + U[k - 2]) / (2 * dy);
            else
                Uy = (U[k + 1] - U[k - 1]) / (2 * dy);
            adv = a * Uy;
        }
        const double V = st.V[k];
        if (!(V > 1e-12) && cfg.sources.exact_compatible)
            throw SolverError("V is not positive at interior node " + std::to_string(i));
        const double src = cfg.sources.S(U[k] + p.alpha_s, p.c_inf - V);
        out[k] = diff / s2 + adv + src;
    }
    return out;
}

}  // namespace

void elliptic_solve(FrontFixedState& st, const ModelParams& p, const SolverConfig& cfg) {
    const int N = st.N();
    const double dy = 1.0 / N, s2 = st.s * st.s;
    const auto n = static_cast<std::size_t>(N);
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = -2.0 * (p.n + 1) / (dy * dy);
    c[0] = 2.0 * (p.n + 1) / (dy * dy);
    for (std::size_t i = 1; i < n; ++i) {
        const double wm = radial_weight(static_cast<int>(i), -0.5, p.n), wp = radial_weight(static_cast<int>(i), 0.5, p.n);
        a[i] = wm / (dy * dy);
        c[i] = wp / (dy * dy);  // V_N = 0 drops the last coupling
        b[i] = -(wm + wp) / (dy * dy);
    }
    const int sweeps = cfg.sources.q_depends_on_c ? 200 : 1;
    for (int it = 0; it < sweeps; ++it) {
        for (std::size_t i = 0; i < n; ++i) d[i] = -s2 * cfg.sources.Q(st.U[i] + p.alpha_s, p.c_inf - st.V[i]);
        auto V = thomas(a, b, c, d);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            change = std::max(change, std::fabs(V[i] - st.V[i]));
            st.V[i] = V[i];
        }
        st.V[n] = 0.0;
        if (change < 1e-12) break;
        if (it + 1 == sweeps && sweeps > 1) throw SolverError("elliptic iteration did not settle");
    }
}

double front_speed(const FrontFixedState& st, const ModelParams& p) {
    const int N = st.N();
    const double dy = 1.0 / N;
    const auto& U = st.U;
    const auto k = static_cast<std::size_t>(N);
    const double Uy = (3.0 * U[k] - 4.0 * U[k - 1] + U[k - 2]) / (2 * dy);
    return -std::pow(p.alpha_s, p.m - 1.0) * Uy / st.s;
}

double step_size(const FrontFixedState& st, const ModelParams& p, const SolverConfig& cfg) {
    const double dy = 1.0 / st.N();
    double Dmax = 0.0;
    for (double u : st.U) Dmax = std::max(Dmax, diffusivity(u, p));
    // The origin node couples with weight 2 (n + 1), hence the (n + 1) factor.
    double dt = cfg.sigma * dy * dy * st.s * st.s / (Dmax * (p.n + 1));
    if (std::fabs(st.sdot) > 0) dt = std::min(dt, dy * st.s / std::fabs(st.sdot));
    return dt;
}

FrontFixedState step(const FrontFixedState& st, const ModelParams& p, const SolverConfig& cfg, double dt) {
    if (!(dt > 1e-14)) throw SolverError("time step underflow (dt = " + std::to_string(dt) + ")");
    const int N = st.N();
    auto advance = [&](FrontFixedState& target, const FrontFixedState& base, const std::vector<double>& r1,
                       const std::vector<double>* r2, double sd1, double sd2) {
        for (int i = 0; i < N; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double rate = r2 ? 0.5 * (r1[k] + (*r2)[k]) : r1[k];
            double u = base.U[k] + dt * rate;
            if (u < 0) {
                if (u < -1e-10) throw SolverError("U became negative at node " + std::to_string(i));
                u = 0.0;
                ++target.clipped;
            }
            target.U[k] = u;
        }
        target.U[static_cast<std::size_t>(N)] = 0.0;
        target.s = base.s + dt * (r2 ? 0.5 * (sd1 + sd2) : sd1);
        if (!(target.s > 0)) throw SolverError("front position became nonpositive");
    };

    FrontFixedState base = st;
    elliptic_solve(base, p, cfg);
    double sd1 = 0.0, sd2 = 0.0;
    const auto r1 = rates(base, p, cfg, sd1);

    FrontFixedState mid = base;
    mid.t = st.t + dt;
    advance(mid, base, r1, nullptr, sd1, 0.0);
    elliptic_solve(mid, p, cfg);
    const auto r2 = rates(mid, p, cfg, sd2);

    FrontFixedState out = base;
    out.t = st.t + dt;
    out.clipped = mid.clipped;
    advance(out, base, r1, &r2, sd1, sd2);
    elliptic_solve(out, p, cfg);
    out.sdot = front_speed(out, p);
    return out;
}

ErrorReport compare_with_exact(const FrontFixedState& st, const ModelParams& p) {
    ErrorReport e;
    e.N = st.N();
    e.t_final = st.t;
    for (int i = 0; i <= st.N(); ++i) {
        const double w = p.omega0 * st.y(i);
        const auto k = static_cast<std::size_t>(i);
        e.err_alpha_sup = std::max(e.err_alpha_sup, std::fabs(st.U[k] - simred::exact_phi(w, p)));
        e.err_c_sup = std::max(e.err_c_sup, std::fabs(st.V[k] - st.t * simred::exact_psi(w, p)));
    }
    e.err_front = std::fabs(st.s - p.omega0 * std::sqrt(st.t));
    return e;
}

RunResult run(const ModelParams& p, const SolverConfig& cfg) {
    cfg.validate();
    p.validate();
    RunResult res;
    FrontFixedState st;
    if (cfg.sources.exact_compatible) {
        st = init_from_exact(cfg.t0, p, cfg);
    } else {
        // Without a closed form the exact profile still serves as smooth initial data.
        st = init_from_exact(cfg.t0, p, cfg);
        elliptic_solve(st, p, cfg);
        st.sdot = front_speed(st, p);
    }
    res.snapshots.push_back(st);
    double next_output = cfg.output_every > 0 ? cfg.t0 + cfg.output_every : INFINITY;
    const double eps = 1e-12 * std::max(1.0, cfg.t_end);
    while (st.t < cfg.t_end - eps) {
        double dt = step_size(st, p, cfg);
        double stop = std::min(cfg.t_end, next_output);
        if (st.t + dt > stop) dt = stop - st.t;
        st = step(st, p, cfg, dt);
        ++res.steps;
        if (st.t >= next_output - eps) {
            res.snapshots.push_back(st);
            next_output += cfg.output_every;
        }
    }
    if (res.snapshots.back().t != st.t) res.snapshots.push_back(st);
    res.final_state = st;
    if (cfg.sources.exact_compatible) res.error = compare_with_exact(st, p);
    return res;
}

std::vector<ErrorReport> convergence_ladder(const ModelParams& p, SolverConfig cfg, const std::vector<int>& Ns) {
    if (!cfg.sources.exact_compatible) throw std::invalid_argument("a convergence ladder needs exact-compatible sources");
    std::vector<ErrorReport> out;
    for (int N : Ns) {
        cfg.N = N;
        cfg.output_every = 0;
        auto e = *run(p, cfg).error;
        if (!out.empty()) {
            const auto& prev = out.back();
            e.observed_order = std::log(prev.err_alpha_sup / e.err_alpha_sup) / std::log(static_cast<double>(N) / prev.N);
        }
        out.push_back(e);
    }
    return out;
}

void write_snapshot_csv(std::ostream& out, const FrontFixedState& st, const ModelParams& p, bool header) {
    if (header) out << "t,s,y,r,U,V,alpha,c\n";
    out.precision(15);
    for (int i = 0; i <= st.N(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double y = st.y(i);
        out << st.t << ',' << st.s << ',' << y << ',' << y * st.s << ',' << st.U[k] << ',' << st.V[k] << ','
            << st.U[k] + p.alpha_s << ',' << p.c_inf - st.V[k] << '\n';
    }
}

}  // namespace pesym::fbsolve
