#include "pesym/liealg/symmetry.hpp"

#include <stdexcept>

namespace pesym::liealg {

using namespace symexpr;

Prolongation prolong2(const Generator& g, const JetContext& ctx) {
    g.validate();
    auto Dx = [&](const Expr& e) { return total_derivative(e, "x", ctx); };
    auto Dt = [&](const Expr& e) { return total_derivative(e, "t", ctx); };

    const Expr dx_xi1 = Dx(g.xi1);
    Prolongation p;
    p.rho_x_1 = Dx(g.eta1) - var("U_x") * dx_xi1;
    p.rho_x_2 = Dx(g.eta2) - var("V_x") * dx_xi1;
    p.rho_t_1 = Dt(g.eta1) - var("U_t") * pdiff(g.xi0, "t") - var("U_x") * pdiff(g.xi1, "t");
    p.sigma_xx_1 = Dx(p.rho_x_1) - var("U_xx") * dx_xi1;
    p.sigma_xx_2 = Dx(p.rho_x_2) - var("V_xx") * dx_xi1;
    return p;
}

namespace {

Expr apply_prolonged(const Generator& g, const Prolongation& p, const Expr& s) {
    std::vector<Expr> terms{
        g.xi0 * pdiff(s, "t"),          g.xi1 * pdiff(s, "x"),
        g.eta1 * pdiff(s, "U"),         g.eta2 * pdiff(s, "V"),
        p.rho_t_1 * pdiff(s, "U_t"),    p.rho_x_1 * pdiff(s, "U_x"),
        p.rho_x_2 * pdiff(s, "V_x"),    p.sigma_xx_1 * pdiff(s, "U_xx"),
        p.sigma_xx_2 * pdiff(s, "V_xx"),
    };
    if (depends_on(s, "V_t")) throw JetError("system depends on V_t");
    return sum(std::move(terms));
}

}  // namespace

InvarianceResiduals invariance_residuals(const PESystem& sys, const Generator& g) {
    sys.validate();
    const Prolongation p = prolong2(g);
    const Bindings manifold = sys.manifold();
    InvarianceResiduals r{substitute(apply_prolonged(g, p, sys.s1()), manifold),
                          substitute(apply_prolonged(g, p, sys.s2()), manifold)};
    if (depends_on(r.s1, "V_t") || depends_on(r.s2, "V_t"))
        throw JetError("V_t survives restriction to the manifold");
    return r;
}

std::vector<DeterminingResidual> determining_residuals(const PESystem& sys, const Generator& g) {
    sys.validate();
    g.validate();
    if (sys.radial != 0) throw std::domain_error("determining equations are stated for the planar class only");
    const Expr& D = sys.D;
    const Expr Dp = pdiff(D, "U");
    if (Dp.is_number(0.0))
        throw std::domain_error("constant D: determining equations divide by d(ln D)/dU");
    const Expr Dpp = pdiff(Dp, "U");
    const Expr lnD_U = Dp / D;

    auto d = [](const Expr& e, std::initializer_list<const char*> vars) {
        Expr out = e;
        for (auto v : vars) out = pdiff(out, v);
        return out;
    };
    const Expr &xi0 = g.xi0, &xi1 = g.xi1, &eta1 = g.eta1, &eta2 = g.eta2;
    const Expr& F = sys.F;
    const Expr& G = sys.G;
    const Expr xi0_t = d(xi0, {"t"});
    const Expr xi1_x = d(xi1, {"x"});
    const Expr xi1_xx = d(xi1, {"x", "x"});
    const Expr eta1_U = d(eta1, {"U"});

    std::vector<DeterminingResidual> out{
        {13, "xi0_x", d(xi0, {"x"})},
        {13, "xi0_U", d(xi0, {"U"})},
        {13, "xi0_V", d(xi0, {"V"})},
        {13, "xi1_t", d(xi1, {"t"})},
        {13, "xi1_V", d(xi1, {"V"})},
        {14, "eta1_V", d(eta1, {"V"})},
        {14, "eta2_U", d(eta2, {"U"})},
        {14, "eta2_VV", d(eta2, {"V", "V"})},
        {15, "", xi0_t - 2.0 * xi1_x + eta1 * lnD_U},
        {16, "", 2.0 * d(eta2, {"x", "V"}) - xi1_xx},
        {17, "", 2.0 * d(eta1, {"x", "U"}) + 2.0 * d(eta1, {"x"}) * lnD_U - xi1_xx + d(xi1, {"t"}) / D},
        {18, "", 2.0 * xi1_x - xi0_t - eta1_U - d(eta1, {"U", "U"}) * D / Dp - eta1 * Dpp / Dp},
        {19, "",
         eta1 * d(F, {"U"}) + eta2 * d(F, {"V"}) - d(eta1, {"t"}) + D * d(eta1, {"x", "x"}) -
             F * (eta1_U - xi0_t)},
        {20, "",
         eta1 * d(G, {"U"}) + eta2 * d(G, {"V"}) + d(eta2, {"x", "x"}) - G * (d(eta2, {"V"}) - 2.0 * xi1_x)},
    };
    return out;
}

Expr apply_operator(const Generator& g, const Expr& e) {
    return g.xi0 * pdiff(e, "t") + g.xi1 * pdiff(e, "x") + g.eta1 * pdiff(e, "U") + g.eta2 * pdiff(e, "V");
}

CommutatorResult commutator(const Generator& a, const Generator& b) {
    CommutatorResult r;
    r.value = {apply_operator(a, b.xi0) - apply_operator(b, a.xi0), apply_operator(a, b.xi1) - apply_operator(b, a.xi1),
               apply_operator(a, b.eta1) - apply_operator(b, a.eta1),
               apply_operator(a, b.eta2) - apply_operator(b, a.eta2)};
    r.violation = r.value.class_violation();
    r.in_class = r.violation.empty();
    return r;
}

}  // namespace pesym::liealg
