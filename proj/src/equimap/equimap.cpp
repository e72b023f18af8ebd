#include "pesym/equimap/equimap.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace pesym::equimap {

using namespace symexpr;

void EquivalenceParams::validate() const {
    for (int i : {1, 3, 5, 7})
        if ((*this)[i] == 0.0) throw std::invalid_argument("equivalence parameter a" + std::to_string(i) + " must be nonzero");
}

EquivalenceParams compose(const EquivalenceParams& p, const EquivalenceParams& q) {
    EquivalenceParams r;
    for (int i : {1, 3, 5, 7}) {
        r[i] = q[i] * p[i];
        r[i + 1] = q[i] * p[i + 1] + q[i + 1];
    }
    return r;
}

PESystem apply_equivalence(const PESystem& sys, const EquivalenceParams& p, GScaling g) {
    p.validate();
    if (sys.radial != 0) throw std::invalid_argument("equivalence transformations act on the planar class");
    const Bindings back{{"U", (var("U") - p[6]) / p[5]}, {"V", (var("V") - p[8]) / p[7]}};
    const double gscale = g == GScaling::Derived ? p[7] / (p[3] * p[3]) : p[7] / p[3];
    PESystem out{num(p[3] * p[3] / p[1]) * substitute(sys.D, back), num(p[5] / p[1]) * substitute(sys.F, back),
                 num(gscale) * substitute(sys.G, back), 0};
    return out;
}

void FormPreservingMap::validate() const {
    for (const auto& v : free_vars(alpha))
        if (v == "x" || v == "U" || v == "V") throw std::invalid_argument("alpha must depend on t only");
    for (const auto* e : {&beta, &K, &P, &L, &Q})
        if (depends_on(*e, "U") || depends_on(*e, "V"))
            throw std::invalid_argument("beta, K, P, L, Q must depend on (t, x) only");
}

FormPreservingMap PointMap::form_preserving() const {
    FormPreservingMap m;
    m.alpha = t;
    m.beta = x;
    m.K = pdiff(U, "U");
    m.P = simplify(substitute(U, {{"U", num(0.0)}}));
    m.L = pdiff(V, "V");
    m.Q = simplify(substitute(V, {{"V", num(0.0)}}));
    if (depends_on(U, "V") || depends_on(V, "U")) throw std::invalid_argument("U and V must transform separately");
    m.validate();
    return m;
}

PointMap equivalence_point_map(const EquivalenceParams& p) {
    p.validate();
    return {p[1] * var("t") + p[2], p[3] * var("x") + p[4], p[5] * var("U") + p[6], p[7] * var("V") + p[8]};
}

std::vector<Expr> fp_constraint_residuals(const FormPreservingMap& m, const PESystem& source, const PESystem& target) {
    m.validate();
    if (source.radial != 0 || target.radial != 0)
        throw std::invalid_argument("form-preserving constraints are stated for the planar class");
    const Expr U = var("U"), V = var("V");
    const Bindings at{{"U", m.K * U + m.P}, {"V", m.L * V + m.Q}};
    const Expr lam = substitute(target.D, at);
    const Expr Ft = substitute(target.F, at);
    const Expr Gt = substitute(target.G, at);
    const Expr& D = source.D;
    const Expr DU = pdiff(D, "U");

    const Expr adot = pdiff(m.alpha, "t");
    const Expr bx = pdiff(m.beta, "x"), bxx = pdiff(bx, "x"), bt = pdiff(m.beta, "t");
    const Expr Kx = pdiff(m.K, "x"), Kxx = pdiff(Kx, "x"), Kt = pdiff(m.K, "t");
    const Expr Px = pdiff(m.P, "x"), Pxx = pdiff(Px, "x"), Pt = pdiff(m.P, "t");
    const Expr Lx = pdiff(m.L, "x"), Lxx = pdiff(Lx, "x");
    const Expr Qx = pdiff(m.Q, "x"), Qxx = pdiff(Qx, "x");
    const Expr W1 = Kx * U + Px;  // (K U + P)_x
    const Expr Z1 = Lx * V + Qx;

    std::vector<Expr> r;
    r.push_back(adot * lam - pow(bx, 2.0) * D);
    r.push_back(adot * Ft - (m.K * source.F + pow(W1, 2.0) / m.K * DU + Kt * U + Pt -
                             D * (Kxx * U + Pxx - 2.0 * W1 * Kx / m.K)));
    r.push_back(pow(bx, 2.0) * Gt - (m.L * source.G + 2.0 * Z1 * Lx / m.L - Lxx * V - Qxx));
    r.push_back(2.0 * bx * W1 * DU + (2.0 * bx * Kx - bxx * m.K) * D + bt * m.K);
    r.push_back(2.0 * bx * Lx - bxx * m.L);
    return r;
}

PushedSystem push_system(const PESystem& source, const PointMap& map, const PESystem& target) {
    if (depends_on(map.t, "x") || depends_on(map.t, "U") || depends_on(map.t, "V"))
        throw std::invalid_argument("the new time must depend on t only");
    if (depends_on(map.x, "U") || depends_on(map.x, "V"))
        throw std::invalid_argument("the new space variable must depend on (t, x) only");
    const auto ctx = JetContext::standard();
    const Expr Tt = pdiff(map.t, "t");
    const Expr Xx = pdiff(map.x, "x");
    const Expr Xt = pdiff(map.x, "t");
    auto dX = [&](const Expr& e) { return total_derivative(e, "x", ctx) / Xx; };

    const Expr WX = dX(map.U);
    const Expr WXX = dX(WX);
    const Expr ZX = dX(map.V);
    const Expr ZXX = dX(ZX);
    const Expr WT = (total_derivative(map.U, "t", ctx) - Xt * WX) / Tt;

    const Bindings chain{{"t", map.t},   {"x", map.x},   {"U", map.U},    {"V", map.V},  {"U_t", WT},
                         {"U_x", WX},    {"U_xx", WXX},  {"V_x", ZX},     {"V_xx", ZXX}};
    const auto on_source = source.manifold();
    return {substitute(substitute(target.s1(), chain), on_source), substitute(substitute(target.s2(), chain), on_source)};
}

Expr jacobian(const PointMap& map) {
    return pdiff(map.t, "t") * pdiff(map.x, "x") * pdiff(map.U, "U") * pdiff(map.V, "V");
}

Generator pull_back(const Generator& g, const PointMap& map) {
    const Bindings at{{"t", map.t}, {"x", map.x}, {"U", map.U}, {"V", map.V}};
    const Generator tg = g.substituted(at);
    const Expr xi0 = tg.xi0 / pdiff(map.t, "t");
    const Expr xi1 = (tg.xi1 - pdiff(map.x, "t") * xi0) / pdiff(map.x, "x");
    const Expr eta1 = (tg.eta1 - pdiff(map.U, "t") * xi0 - pdiff(map.U, "x") * xi1) / pdiff(map.U, "U");
    const Expr eta2 = (tg.eta2 - pdiff(map.V, "t") * xi0 - pdiff(map.V, "x") * xi1) / pdiff(map.V, "V");
    return {simplify(xi0), simplify(xi1), simplify(eta1), simplify(eta2)};
}

std::string scaling_name(GScaling g) { return g == GScaling::Derived ? "a7/a3^2" : "a7/a3"; }

std::vector<ScalingCheck> check_equivalence_scalings(std::uint64_t seed, int samples, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 2.0), shift(-1.0, 1.0);
    std::bernoulli_distribution sign(0.5);
    const PESystem sys = PESystem::parse("d(U)", "f(U + 2*V)", "g(U*V)");
    std::vector<ScalingCheck> out(2);
    out[1].scaling = GScaling::Printed;
    std::vector<std::set<int>> failed(2);
    for (int k = 0; k < samples; ++k) {
        EquivalenceParams p;
        for (int i : {1, 3, 5, 7}) {
            p[i] = mag(rng) * (sign(rng) ? 1.0 : -1.0);
            p[i + 1] = shift(rng);
        }
        p[1] = std::fabs(p[1]);
        if (std::fabs(std::fabs(p[3]) - 1.0) < 0.2) p[3] = 1.7 * (p[3] < 0 ? -1 : 1);
        JetContext ctx = JetContext::standard();
        ctx.functions["d"] = exponential_binding(1.0 + 0.5 * mag(rng), 0.5);
        ctx.functions["f"] = random_standin(rng, k);
        ctx.functions["g"] = random_standin(rng, k + 1);
        ZeroTestOptions zo;
        zo.tol = tol;
        zo.seed = rng();
        const auto map = equivalence_point_map(p);
        for (std::size_t c = 0; c < out.size(); ++c) {
            const auto target = apply_equivalence(sys, p, out[c].scaling);
            const auto fp = is_zero_all(fp_constraint_residuals(map.form_preserving(), sys, target), ctx, zo);
            for (std::size_t j = 0; j < fp.size(); ++j) {
                out[c].worst = std::max(out[c].worst, fp[j].worst_ratio);
                if (!fp[j].zero) failed[c].insert(static_cast<int>(j) + 1);
            }
            const auto pushed = push_system(sys, map, target);
            for (const auto& r : is_zero_all({pushed.s1, pushed.s2}, ctx, zo)) {
                out[c].push_zero = out[c].push_zero && r.zero;
                out[c].worst = std::max(out[c].worst, r.worst_ratio);
            }
        }
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c].failed_constraints.assign(failed[c].begin(), failed[c].end());
        out[c].constraints_zero = failed[c].empty();
    }
    return out;
}

}  // namespace pesym::equimap
