#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pesym/fbsolve/fbsolve.hpp"

using namespace pesym::fbsolve;
namespace sr = pesym::simred;

namespace {

SolverConfig config(const ModelParams& p, int N, double t_end, bool cubic = false) {
    SolverConfig cfg;
    cfg.N = N;
    cfg.t0 = 1.0;
    cfg.t_end = t_end;
    cfg.sources = exact_sources(p, cubic);
    return cfg;
}

ModelParams params(double m, int n) {
    ModelParams p;
    p.m = m;
    p.n = n;
    return p;
}

double elliptic_error(const ModelParams& p, int N) {
    auto cfg = config(p, N, 1.0);
    auto st = init_from_exact(1.0, p, cfg);
    const auto exact = st.V;
    elliptic_solve(st, p, cfg);
    double err = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) err = std::max(err, std::fabs(st.V[i] - exact[i]));
    return err;
}

}  // namespace

TEST_CASE("fbsolve: initial state from the closed form") {
    const auto p = params(1.0, 0);
    auto st = init_from_exact(1.0, p, config(p, 100, 2.0));
    CHECK(st.s == doctest::Approx(1.0));
    CHECK(st.U[0] == doctest::Approx(0.25));
    CHECK(st.V[0] == doctest::Approx(0.0520833).epsilon(1e-6));
    CHECK(st.U.back() == 0.0);
    CHECK(st.V.back() == 0.0);
    CHECK(init_from_exact(4.0, p, config(p, 100, 5.0)).s == doctest::Approx(2.0));
}

TEST_CASE("fbsolve: elliptic solve with zero uptake gives zero") {
    const auto p = params(1.0, 0);
    auto cfg = config(p, 64, 1.0);
    cfg.sources = zero_sources();
    auto st = init_from_exact(1.0, p, cfg);
    elliptic_solve(st, p, cfg);
    for (double v : st.V) CHECK(v == 0.0);
}

TEST_CASE("fbsolve: elliptic solve is second order against the closed form") {
    for (int n : {0, 1, 2}) {
        const auto p = params(1.0, n);
        const double e1 = elliptic_error(p, 50), e2 = elliptic_error(p, 100);
        CAPTURE(n);
        CHECK(e2 < 1e-4);
        const double order = std::log2(e1 / e2);
        CHECK(order > 1.8);
        CHECK(order < 2.2);
    }
}

TEST_CASE("fbsolve: flat data with no sources stays put") {
    const auto p = params(1.0, 0);
    auto cfg = config(p, 32, 1.0);
    cfg.sources = zero_sources();
    FrontFixedState st;
    st.t = 1.0;
    st.s = 1.0;
    st.U.assign(33, 0.0);
    st.V.assign(33, 0.0);
    auto next = st;
    for (int k = 0; k < 10; ++k) next = step(next, p, cfg, 1e-3);
    CHECK(next.s == 1.0);
    CHECK(next.sdot == 0.0);
    for (std::size_t i = 0; i < next.U.size(); ++i) {
        CHECK(next.U[i] == 0.0);
        CHECK(next.V[i] == 0.0);
    }
}

TEST_CASE("fbsolve: short run follows the exact solution") {
    for (int n : {0, 2}) {
        const auto p = params(1.0, n);
        auto cfg = config(p, 64, 1.2);
        cfg.output_every = 0.05;
        const auto res = run(p, cfg);
        CAPTURE(n);
        REQUIRE(res.error);
        CHECK(res.error->err_alpha_sup < 1e-3);
        CHECK(res.error->err_front < 1e-3);
        CHECK(res.snapshots.size() >= 5);
        for (std::size_t k = 1; k < res.snapshots.size(); ++k) CHECK(res.snapshots[k].s > res.snapshots[k - 1].s);
        // c = c_inf - V is nondecreasing towards the front.
        const auto& V = res.final_state.V;
        for (std::size_t i = 1; i < V.size(); ++i) CHECK(V[i] <= V[i - 1] + 1e-14);
        // The reported speed is the Stefan condition of the reported profile.
        auto copy = res.final_state;
        CHECK(std::fabs(front_speed(copy, p) - res.final_state.sdot) < 1e-12);
    }
}

TEST_CASE("fbsolve: spatial order on a short horizon") {
    const auto p = params(0.0, 0);
    auto cfg = config(p, 32, 1.1, true);
    const auto ladder = convergence_ladder(p, cfg, {32, 64});
    REQUIRE(ladder[1].observed_order);
    CHECK(*ladder[1].observed_order > 1.8);
    CHECK(*ladder[1].observed_order < 2.2);
}

TEST_CASE("fbsolve: parsed sources reproduce the built-in cubic") {
    const auto p = params(0.0, 0);
    auto exact = config(p, 32, 1.05, true);
    auto parsed = exact;
    parsed.sources = parsed_sources("q0/(3*a)*(alpha - a)*(alpha - a1)*(a2 - alpha)/(cinf - c)", "q0*(alpha - a)",
                                    {{"q0", p.q0}, {"a", p.alpha_s}, {"a1", sr::cubic_root1(p)},
                                     {"a2", sr::cubic_root2(p)}, {"cinf", p.c_inf}});
    const auto r1 = run(p, exact), r2 = run(p, parsed);
    CHECK(r1.steps == r2.steps);
    CHECK(std::fabs(r1.final_state.s - r2.final_state.s) < 1e-12);
    for (std::size_t i = 0; i < r1.final_state.U.size(); ++i)
        CHECK(std::fabs(r1.final_state.U[i] - r2.final_state.U[i]) < 1e-12);
    CHECK_THROWS_AS(parsed_sources("alpha*k", "c"), std::invalid_argument);
}

TEST_CASE("fbsolve: configuration checks") {
    const auto p = params(1.0, 0);
    auto cfg = config(p, 8, 2.0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.N = 64;
    cfg.sigma = 0.7;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.sigma = 0.4;
    cfg.t_end = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(step(init_from_exact(1.0, p, config(p, 64, 2.0)), p, config(p, 64, 2.0), 0.0), SolverError);
}

TEST_CASE("fbsolve: snapshot CSV layout") {
    const auto p = params(1.0, 0);
    const auto st = init_from_exact(1.0, p, config(p, 16, 1.0));
    std::ostringstream out;
    write_snapshot_csv(out, st, p);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,s,y,r,U,V,alpha,c");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 17);
}
