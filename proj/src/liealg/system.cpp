#include "pesym/liealg/system.hpp"

#include "pesym/common/keyvalue.hpp"
#include "pesym/symexpr/jet.hpp"
#include "pesym/symexpr/parse.hpp"

namespace pesym::liealg {

using namespace symexpr;

namespace {

const std::set<std::string>& jet_names() {
    static const std::set<std::string> names = JetContext::standard().coordinates();
    return names;
}

bool mentions_any(const Expr& e, std::initializer_list<std::string_view> names) {
    for (auto n : names)
        if (depends_on(e, n)) return true;
    return false;
}

}  // namespace

PESystem PESystem::parse(std::string_view d, std::string_view f, std::string_view g, int radial) {
    PESystem s{simplify(symexpr::parse(d)), simplify(symexpr::parse(f)), simplify(symexpr::parse(g)), radial};
    s.validate();
    return s;
}

void PESystem::validate() const {
    if (radial < 0 || radial > 2) throw InvariantError("radial index must be 0, 1 or 2");
    for (const auto& [label, e] : {std::pair{"D", &D}, {"F", &F}, {"G", &G}}) {
        for (const auto& v : free_vars(*e)) {
            if (v == "U" || v == "V") continue;
            if (jet_names().contains(v))
                throw InvariantError(std::string(label) + " must not depend on " + v);
        }
    }
    if (depends_on(D, "V")) throw InvariantError("D must depend on U only");
    if (D.is_number(0.0)) throw InvariantError("D must not be zero");
}

Expr PESystem::s1() const {
    const auto ctx = JetContext::standard();
    Expr flux = D * var("U_x");
    Expr div = total_derivative(flux, "x", ctx);
    if (radial != 0) div = div + num(radial) * flux / var("x");
    return var("U_t") - div - F;
}

Expr PESystem::s2() const {
    Expr lap = var("V_xx");
    if (radial != 0) lap = lap + num(radial) * var("V_x") / var("x");
    return lap + G;
}

Bindings PESystem::manifold() const {
    // S1 is linear in U_t with unit coefficient, S2 linear in V_xx.
    Expr ut = var("U_t") - s1();
    Expr vxx = var("V_xx") - s2();
    return {{"U_t", ut}, {"V_xx", vxx}};
}

PESystem PESystem::substituted(const Bindings& b) const {
    return {substitute(D, b), substitute(F, b), substitute(G, b), radial};
}

std::string PESystem::describe() const {
    std::string s = "D = " + print(D) + "; F = " + print(F) + "; G = " + print(G);
    if (radial) s += "; n = " + std::to_string(radial);
    return s;
}

Generator Generator::parse(std::string_view a, std::string_view b, std::string_view c, std::string_view d) {
    return {simplify(symexpr::parse(a)), simplify(symexpr::parse(b)), simplify(symexpr::parse(c)),
            simplify(symexpr::parse(d))};
}

Generator Generator::parse_tuple(std::string_view tuple) {
    auto parts = split(tuple, ';');
    if (parts.size() != 4)
        throw FormatError("generator needs four ';'-separated components, got '" + std::string(tuple) + "'");
    return parse(parts[0], parts[1], parts[2], parts[3]);
}

std::string Generator::class_violation() const {
    if (mentions_any(xi0, {"x", "U", "V"})) return "xi0 depends on x, U or V";
    if (mentions_any(xi1, {"U", "V"})) return "xi1 depends on U or V";
    if (mentions_any(eta1, {"V"})) return "eta1 depends on V";
    if (mentions_any(eta2, {"U"})) return "eta2 depends on U";
    for (const Expr* e : {&xi0, &xi1, &eta1, &eta2})
        for (const auto& v : free_vars(*e))
            if (jet_names().contains(v) && v != "t" && v != "x" && v != "U" && v != "V")
                return "component depends on jet coordinate " + v;
    if (!pdiff(pdiff(eta2, "V"), "V").is_number(0.0)) return "eta2 is not affine in V";
    return {};
}

void Generator::validate() const {
    if (auto v = class_violation(); !v.empty()) throw InvariantError("generator outside class: " + v);
}

Generator Generator::substituted(const Bindings& b) const {
    return {substitute(xi0, b), substitute(xi1, b), substitute(eta1, b), substitute(eta2, b)};
}

Generator Generator::scaled(const Expr& c) const { return {c * xi0, c * xi1, c * eta1, c * eta2}; }

std::string Generator::describe() const {
    return print(xi0) + " ; " + print(xi1) + " ; " + print(eta1) + " ; " + print(eta2);
}

Generator operator+(const Generator& a, const Generator& b) {
    return {a.xi0 + b.xi0, a.xi1 + b.xi1, a.eta1 + b.eta1, a.eta2 + b.eta2};
}

Generator translation_t() { return {num(1.0), num(0.0), num(0.0), num(0.0)}; }
Generator translation_x() { return {num(0.0), num(1.0), num(0.0), num(0.0)}; }

}  // namespace pesym::liealg
