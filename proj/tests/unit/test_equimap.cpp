#include <doctest.h>

#include <iostream>
#include <random>

#include "pesym/common/keyvalue.hpp"
#include "pesym/equimap/equimap.hpp"
#include "pesym/liealg/symmetry.hpp"
#include "pesym/symexpr/parse.hpp"

using namespace pesym;
using namespace pesym::equimap;
using namespace pesym::symexpr;
using liealg::PESystem;

namespace {

const std::vector<liealg::CatalogEntry>& catalog() {
    static const auto c = liealg::load_catalog(PESYM_CATALOG_DIR);
    return c;
}

const std::vector<ReductionEntry>& reductions() {
    static const auto r = load_reductions(PESYM_CATALOG_DIR);
    return r;
}

const ReductionEntry& reduction(const std::string& id) {
    for (const auto& r : reductions())
        if (r.id() == id) return r;
    throw std::runtime_error("no reduction " + id);
}

JetContext context_with(const FunctionTable& fns) {
    JetContext ctx = JetContext::standard();
    ctx.functions = fns;
    return ctx;
}

bool all_zero(const std::vector<Expr>& es, const JetContext& ctx) {
    for (const auto& r : is_zero_all(es, ctx))
        if (!r.zero) return false;
    return true;
}

/// A generic planar system with random stand-ins for D, F and G.
struct Generic {
    PESystem sys = PESystem::parse("d(U)", "f(U + 2*V)", "g(U*V)");
    FunctionTable fns;
    explicit Generic(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        fns["d"] = exponential_binding(1.0 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng), 0.7);
        fns["f"] = random_standin(rng, 0);
        fns["g"] = random_standin(rng, 1);
    }
};

EquivalenceParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mag(0.5, 2.0), shift(-1.0, 1.0);
    std::bernoulli_distribution sign(0.5);
    EquivalenceParams p;
    for (int i : {1, 3, 5, 7}) {
        p[i] = mag(rng) * (sign(rng) ? 1.0 : -1.0);
        p[i + 1] = shift(rng);
    }
    p[1] = std::fabs(p[1]);  // keeps the parabolic direction of time
    return p;
}

}  // namespace

TEST_CASE("equivalence: identity leaves the system unchanged") {
    const auto sys = PESystem::parse("U^2", "U*V", "exp(U) - V");
    const auto out = apply_equivalence(sys, EquivalenceParams{});
    CHECK(print(out.D) == print(sys.D));
    CHECK(print(out.F) == print(sys.F));
    CHECK(print(out.G) == print(sys.G));
}

TEST_CASE("equivalence: time and space scaling rescales the coefficients") {
    const auto sys = PESystem::parse("U^2", "U*V", "exp(U) - V");
    EquivalenceParams p;
    p[1] = 4;
    p[3] = 2;
    const auto out = apply_equivalence(sys, p);
    const Point pt{{"U", 0.7}, {"V", 1.3}};
    CHECK(evaluate(out.D, pt) == doctest::Approx(evaluate(sys.D, pt)));         // 2^2 / 4
    CHECK(evaluate(out.F, pt) == doctest::Approx(evaluate(sys.F, pt) / 4.0));
    CHECK(evaluate(out.G, pt) == doctest::Approx(evaluate(sys.G, pt) / 4.0));  // a7 / a3^2
}

TEST_CASE("equivalence: shifting and scaling U normalizes d (U + c)^k") {
    const auto sys = PESystem::parse("2*(U + 0.5)^1.5", "U", "U");
    EquivalenceParams p;
    p[1] = 2;
    p[6] = 0.5;
    const auto out = apply_equivalence(sys, p);
    for (double w : {0.6, 1.1, 1.9})
        CHECK(evaluate(out.D, {{"U", w}}) == doctest::Approx(std::pow(w, 1.5)).epsilon(1e-12));
}

TEST_CASE("equivalence: vanishing scale is rejected") {
    EquivalenceParams p;
    p[3] = 0;
    CHECK_THROWS_AS(apply_equivalence(PESystem::parse("U", "0", "U"), p), std::invalid_argument);
}

TEST_CASE("equivalence: composition matches applying twice") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        Generic g(100 + trial);
        const auto p = random_params(rng), q = random_params(rng);
        const auto twice = apply_equivalence(apply_equivalence(g.sys, p), q);
        const auto once = apply_equivalence(g.sys, compose(p, q));
        CHECK(all_zero({twice.D - once.D, twice.F - once.F, twice.G - once.G}, context_with(g.fns)));
    }
}

TEST_CASE("equivalence: the derived potential scaling satisfies the form-preserving constraints") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
        Generic g(200 + trial);
        auto p = random_params(rng);
        if (std::fabs(std::fabs(p[3]) - 1.0) < 0.1) p[3] = 1.7;
        const auto map = equivalence_point_map(p).form_preserving();
        const auto derived = apply_equivalence(g.sys, p, GScaling::Derived);
        CHECK(all_zero(fp_constraint_residuals(map, g.sys, derived), context_with(g.fns)));

        const auto printed = apply_equivalence(g.sys, p, GScaling::Printed);
        const auto r = fp_constraint_residuals(map, g.sys, printed);
        const auto ctx = context_with(g.fns);
        CHECK(all_zero({r[0], r[1], r[3], r[4]}, ctx));
        CHECK_FALSE(is_zero(r[2], ctx).zero);
    }
}

TEST_CASE("equivalence: the chain-rule push agrees with the derived scaling") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        Generic g(300 + trial);
        const auto p = random_params(rng);
        const auto map = equivalence_point_map(p);
        const auto pushed = push_system(g.sys, map, apply_equivalence(g.sys, p));
        CHECK(all_zero({pushed.s1, pushed.s2}, context_with(g.fns)));
    }
}

TEST_CASE("push: a map that is not form-preserving is rejected") {
    PointMap m{var("t") + var("x"), var("x"), var("U"), var("V")};
    CHECK_THROWS_AS(push_system(PESystem::parse("U", "0", "U"), m, PESystem::parse("U", "0", "U")),
                    std::invalid_argument);
    PointMap n{var("t"), var("x"), var("U") * var("U"), var("V")};
    CHECK_THROWS_AS(n.form_preserving(), std::invalid_argument);
}

TEST_CASE("push: a wrong target is detected") {
    const auto& e = reduction("T3.3");
    const auto inst = instantiate_reduction(e, find_entry(catalog(), 1, 8), {});
    auto wrong = inst.target.system;
    wrong.G = wrong.G + num(0.1) * var("V");
    FunctionTable fns;
    std::mt19937_64 rng(5);
    fns["f"] = random_standin(rng, 0);
    fns["g"] = random_standin(rng, 1);
    const auto ctx = reduction_context(e, fns);
    CHECK(is_zero(push_system(inst.source, inst.map, inst.target.system).s2, ctx).zero);
    CHECK_FALSE(is_zero(push_system(inst.source, inst.map, wrong).s2, ctx).zero);
}

TEST_CASE("reductions: catalog holds every row and branch") {
    int t3 = 0, t4 = 0;
    for (const auto& r : reductions()) (r.table == 3 ? t3 : t4)++;
    CHECK(t3 == 8);
    CHECK(t4 == 20);
}

TEST_CASE("reductions: every row lands on its target") {
    for (const auto& r : reductions()) {
        const auto rep = verify_reduction(r, catalog());
        CAPTURE(r.id());
        for (const auto& rec : rep.records) {
            if (!rec.ok) {
                std::cerr << r.id() << " -> " << rep.target << " push " << rec.push_worst << " constraints";
                for (int c : rec.failed_constraints) std::cerr << ' ' << c;
                std::cerr << " jac " << rec.min_jacobian << "\n";
            }
        }
        CHECK(rep.ok());
    }
}

TEST_CASE("reductions: symmetries of the canonical system pull back to the source") {
    for (const char* id : {"T3.3", "T3.4"}) {
        const auto& e = reduction(id);
        const auto inst = instantiate_reduction(e, find_entry(catalog(), 1, 8), {});
        std::mt19937_64 rng(21);
        FunctionTable fns;
        fns["f"] = random_standin(rng, 0);
        fns["g"] = random_standin(rng, 1);
        const auto ctx = reduction_context(e, fns);
        CAPTURE(id);
        for (const auto& g : inst.target.generators) {
            const auto back = pull_back(g, inst.map);
            CHECK(back.class_violation().empty());
            const auto r = liealg::invariance_residuals(inst.source, back);
            CHECK(all_zero({r.s1, r.s2}, ctx));
        }
        // A perturbed target generator does not pull back to a symmetry.
        auto bad = inst.target.generators.back();
        bad.eta1 = bad.eta1 + var("U");
        const auto r = liealg::invariance_residuals(inst.source, pull_back(bad, inst.map));
        CHECK_FALSE(all_zero({r.s1, r.s2}, ctx));
    }
}

TEST_CASE("reductions: malformed files are rejected") {
    CHECK_THROWS_AS(ReductionEntry::parse("table = 3\ncase = 1\nD = u\nF = u\nG = u\ntarget = 2 1\n"), FormatError);
    CHECK_THROWS_AS(ReductionEntry::parse("table = 3\ncase = 1\nD = u +\nF = u\nG = u\ntarget = 1 1\n"), FormatError);
}
