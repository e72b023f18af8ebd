#include <doctest.h>

#include <cmath>
#include <random>

#include "pesym/symexpr/calculus.hpp"
#include "pesym/symexpr/eval.hpp"
#include "pesym/symexpr/jet.hpp"
#include "pesym/symexpr/parse.hpp"

using namespace pesym::symexpr;

namespace {

Expr P(std::string_view s) { return parse(s); }

bool same_value(const Expr& a, const Expr& b, const JetContext& ctx = JetContext::standard()) {
    return is_zero(a - b, ctx).zero;
}

/// Random polynomial in U, V, x with small integer exponents.
Expr random_polynomial(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nterms(1, 4), deg(0, 3);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::vector<Expr> terms;
    for (int i = nterms(rng); i > 0; --i) {
        terms.push_back(num(coef(rng)) * pow(var("U"), deg(rng)) * pow(var("V"), deg(rng)) *
                        pow(var("x"), deg(rng)));
    }
    return sum(terms);
}

/// Random expression built from the full grammar over U, V, x.
Expr random_expression(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    std::uniform_real_distribution<double> coef(0.5, 2.0);
    const char* names[] = {"U", "V", "x"};
    switch (pick(rng)) {
        case 0: return num(std::round(coef(rng) * 4.0) / 4.0);
        case 1: return var(names[rng() % 3]);
        case 2: return random_expression(rng, depth - 1) + random_expression(rng, depth - 1);
        case 3: return random_expression(rng, depth - 1) * random_expression(rng, depth - 1);
        case 4: return random_expression(rng, depth - 1) - random_expression(rng, depth - 1);
        case 5: return random_expression(rng, depth - 1) / (num(3.0) + var(names[rng() % 3]));
        case 6: return pow(random_expression(rng, depth - 1), num(static_cast<double>(rng() % 3 + 1)));
        case 7: return exp(var(names[rng() % 3]) * num(0.5)) * random_expression(rng, depth - 1);
        default: return func("f", static_cast<int>(rng() % 2), random_expression(rng, depth - 1));
    }
}

Point random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.3, 2.0);
    return {{"U", u(rng)}, {"V", u(rng)}, {"x", u(rng)}, {"t", u(rng)}};
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
    auto e = P("U^k");
    REQUIRE(e.as<Power>());
    CHECK(e.as<Power>()->base.var_name() == "U");
    CHECK(e.as<Power>()->exponent.var_name() == "k");

    auto p = P("exp(V)*f(U)");
    REQUIRE(p.as<Product>());
    const auto& fs = p.as<Product>()->factors;
    REQUIRE(fs.size() == 2);
    REQUIRE(fs[0].as<Call>());
    CHECK(fs[0].as<Call>()->fn == Builtin::Exp);
    REQUIRE(fs[1].as<FuncApp>());
    CHECK(fs[1].as<FuncApp>()->name == "f");
    CHECK(fs[1].as<FuncApp>()->order == 0);

    auto q = P("(U+alpha_s)^m * U_x");
    CHECK(free_vars(q) == std::set<std::string>{"U", "alpha_s", "m", "U_x"});
}

TEST_CASE("primes give derivative order and print back") {
    auto e = P("f''(U)");
    REQUIRE(e.as<FuncApp>());
    CHECK(e.as<FuncApp>()->order == 2);
    CHECK(print(e) == "f''(U)");
}

TEST_CASE("parse errors carry a byte offset") {
    CHECK_THROWS_AS(P("U +* V"), ParseError);
    CHECK_THROWS_AS(P("exp'(U)"), ParseError);
    CHECK_THROWS_AS(P("U $ V"), ParseError);
    CHECK_THROWS_AS(P("(U"), ParseError);
    try {
        P("U + )");
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
}

TEST_CASE("sums and products stay flat") {
    auto e = simplify(P("(a + b) + (c + (d + e))"));
    REQUIRE(e.as<Sum>());
    for (const auto& t : e.as<Sum>()->terms) CHECK_FALSE(t.as<Sum>());
    auto p = simplify(P("(a * b) * (c * (d * e))"));
    REQUIRE(p.as<Product>());
    for (const auto& t : p.as<Product>()->factors) CHECK_FALSE(t.as<Product>());
}

TEST_CASE("pdiff examples") {
    CHECK(same_value(pdiff(P("U^k"), "U"), P("k*U^(k-1)")));
    JetContext ctx = JetContext::standard();
    ctx.functions["f"] = polynomial_binding({0.3, -1.0, 0.5, 0.2});
    CHECK(is_zero(pdiff(P("f(U*V^3)"), "V") - P("f'(U*V^3)*3*U*V^2"), ctx).zero);
    CHECK(pdiff(P("U_x^2"), "U").is_number(0.0));
    CHECK(pdiff(P("3 + exp(2)"), "U").is_number(0.0));
}

TEST_CASE("total derivative examples") {
    auto ctx = JetContext::standard();
    CHECK(equal(total_derivative(P("U"), "x", ctx), var("U_x")));
    CHECK(same_value(total_derivative(P("x*U^2"), "x", ctx), P("U^2 + 2*x*U*U_x")));
    CHECK(same_value(total_derivative(P("2*t*U"), "t", ctx), P("2*U + 2*t*U_t")));
    CHECK_THROWS_AS(total_derivative(P("U_xx"), "x", ctx), JetError);
    CHECK_THROWS_AS(total_derivative(P("U_x"), "t", ctx), JetError);
}

TEST_CASE("substitute examples") {
    CHECK(substitute(P("U_t - F"), {{"U_t", var("F")}}).is_number(0.0));
    CHECK(substitute(P("V_xx + G"), {{"V_xx", -var("G")}}).is_number(0.0));
    CHECK(same_value(substitute(P("U^k"), {{"U", P("exp(y)*u")}}), P("(exp(y)*u)^k"),
                     JetContext{}));
    auto swapped = substitute(P("U - 2*V"), {{"U", var("V")}, {"V", var("U")}});
    CHECK(same_value(swapped, P("V - 2*U")));
}

TEST_CASE("is_zero examples") {
    auto ctx = JetContext::standard();
    CHECK(is_zero(P("(U+V)^2 - U^2 - 2*U*V - V^2"), ctx).zero);
    auto r = is_zero(P("U - V"), ctx);
    CHECK_FALSE(r.zero);
    CHECK(r.witness.contains("U"));
    CHECK(std::fabs(r.witness.at("U") - r.witness.at("V")) > 0.0);
    CHECK_THROWS_AS(is_zero(P("U"), ctx, ZeroTestOptions{.trials = 4}), std::invalid_argument);
}

TEST_CASE("is_zero resamples domain errors and gives up on hopeless input") {
    auto ctx = JetContext::standard();
    ctx.windows["U"] = {-1.0, 1.0};
    CHECK(is_zero(P("ln(U)^2 - ln(U)*ln(U)"), ctx).zero);
    ctx.windows["U"] = {-2.0, -1.0};
    CHECK_THROWS_AS(is_zero(P("ln(U)"), ctx), EvalError);
}

TEST_CASE("is_zero is reproducible for a fixed seed") {
    auto ctx = JetContext::standard();
    auto a = is_zero(P("U*V - x"), ctx);
    auto b = is_zero(P("U*V - x"), ctx);
    CHECK(a.witness == b.witness);
    CHECK(a.worst_value == b.worst_value);
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(evaluate(P("ln(0-1)"), {}), EvalError);
    CHECK_THROWS_AS(evaluate(P("sqrt(0-1)"), {}), EvalError);
    CHECK_THROWS_AS(evaluate(P("1/x"), {{"x", 0.0}}), EvalError);
    CHECK_THROWS_AS(evaluate(P("y"), {}), EvalError);
    CHECK_THROWS_AS(evaluate(P("f(2)"), {}), EvalError);
    CHECK(evaluate(P("(0-8)^3"), {}) == doctest::Approx(-512.0));
}

TEST_CASE("property: pdiff matches central differences on random polynomials") {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 40; ++i) {
        Expr e = random_polynomial(rng);
        const char* v = std::array{"U", "V", "x"}[i % 3];
        Point p = random_point(rng);
        const double h = 1e-6;
        Point lo = p, hi = p;
        lo[v] -= h;
        hi[v] += h;
        double fd = (evaluate(e, hi) - evaluate(e, lo)) / (2 * h);
        double exact = evaluate(pdiff(e, v), p);
        CHECK(std::fabs(fd - exact) / (1.0 + std::fabs(exact)) < 1e-4);
    }
}

TEST_CASE("property: second total x-derivative stays within second-order jets") {
    std::mt19937_64 rng(202);
    auto ctx = JetContext::standard();
    for (int i = 0; i < 30; ++i) {
        Expr e = random_expression(rng, 3) * var("t");
        ctx.functions["f"] = polynomial_binding({0.5, 0.25, -0.5});
        Expr d2 = total_derivative(total_derivative(e, "x", ctx), "x", ctx);
        for (const auto& n : free_vars(d2)) CHECK(ctx.is_coordinate(n));
    }
}

TEST_CASE("property: print then parse evaluates identically") {
    std::mt19937_64 rng(303);
    FunctionTable fns{{"f", polynomial_binding({0.5, -0.75, 0.25, 0.125})}};
    for (int i = 0; i < 60; ++i) {
        Expr e = random_expression(rng, 4);
        Expr back = parse(print(e));
        for (int k = 0; k < 20; ++k) {
            Point p = random_point(rng);
            double a = evaluate(e, p, fns), b = evaluate(back, p, fns);
            CHECK(std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a)));
        }
    }
}

TEST_CASE("property: substitute then evaluate equals composed evaluation") {
    std::mt19937_64 rng(404);
    FunctionTable fns{{"f", exponential_binding(0.5, 0.3)}};
    for (int i = 0; i < 40; ++i) {
        Expr e = random_expression(rng, 3);
        Expr su = random_expression(rng, 2), sv = random_expression(rng, 2);
        Expr composed = substitute(e, {{"U", su}, {"V", sv}});
        for (int k = 0; k < 10; ++k) {
            Point p = random_point(rng);
            Point inner = p;
            inner["U"] = evaluate(su, p, fns);
            inner["V"] = evaluate(sv, p, fns);
            double direct = evaluate(e, inner, fns);
            double via = evaluate(composed, p, fns);
            CHECK(std::fabs(direct - via) <= 1e-12 * (1.0 + std::fabs(direct)) * 10);
        }
    }
}

TEST_CASE("stand-in derivative tables are consistent") {
    std::mt19937_64 rng(505);
    for (int variant = 0; variant < 6; ++variant) {
        auto f = random_standin(rng, variant);
        for (double x : {0.4, 1.1, 1.9}) {
            const double h = 1e-6;
            for (int order = 0; order < 3; ++order) {
                double fd = (f(order, x + h) - f(order, x - h)) / (2 * h);
                CHECK(std::fabs(fd - f(order + 1, x)) < 1e-5 * (1 + std::fabs(fd)));
            }
        }
    }
    for (int which = 0; which < 3; ++which) {
        auto f = time_sample(which);
        CHECK(std::fabs((f(0, 1.0 + 1e-6) - f(0, 1.0 - 1e-6)) / 2e-6 - f(1, 1.0)) < 1e-6);
    }
}
