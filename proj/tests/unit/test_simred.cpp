#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "pesym/simred/ode.hpp"
#include "pesym/simred/simred.hpp"

using namespace pesym::simred;

namespace {

ModelParams fig1(double m = 1.0, int n = 0) {
    ModelParams p;
    p.m = m;
    p.n = n;
    return p;
}

}  // namespace

TEST_CASE("simred: closed-form profile values") {
    auto p = fig1();
    CHECK(exact_phi(1.0, p) == 0.0);
    CHECK(exact_phi(0.0, p) == doctest::Approx(0.25));
    CHECK(exact_phi(0.0, fig1(0.0)) == doctest::Approx(0.125));
    CHECK(exact_psi(1.0, p) == 0.0);
    CHECK(exact_psi(0.0, p) == doctest::Approx(5 * 0.5 / 48).epsilon(1e-14));
    CHECK(exact_psi(0.0, fig1(1.0, 2)) == doctest::Approx(0.5 / 80 * 7.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(exact_phi(1.5, p), std::domain_error);
    CHECK_THROWS_AS(exact_phi(-0.1, p), std::domain_error);
}

TEST_CASE("simred: planar psi matches the 1/48 form") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        ModelParams p = fig1(std::vector<double>{0, 0.5, 1}[i % 3]);
        p.omega0 = 0.5 + u(rng);
        p.q0 = 0.2 + u(rng);
        const double w = p.omega0 * u(rng), P = p.omega0 * p.omega0;
        const double ref = p.amplitude() * p.q0 / 48 * (P - w * w) * (5 * P - w * w);
        CHECK(exact_psi(w, p) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("simred: derivatives agree with finite differences") {
    for (int n : {0, 1, 2}) {
        auto p = fig1(0.5, n);
        for (double w : {0.1, 0.4, 0.8}) {
            const double h = 1e-5;
            CHECK(exact_dphi(w, p) == doctest::Approx((exact_phi(w + h, p) - exact_phi(w - h, p)) / (2 * h)).epsilon(1e-8));
            CHECK(exact_dpsi(w, p) == doctest::Approx((exact_psi(w + h, p) - exact_psi(w - h, p)) / (2 * h)).epsilon(1e-8));
            CHECK(exact_ddpsi(w, p) ==
                  doctest::Approx((exact_dpsi(w + h, p) - exact_dpsi(w - h, p)) / (2 * h)).epsilon(1e-7));
        }
    }
}

TEST_CASE("simred: Stefan slope at the front") {
    for (double m : {0.0, 0.5, 1.0}) {
        auto p = fig1(m);
        p.omega0 = 1.3;
        CHECK(exact_dphi(p.omega0, p) == doctest::Approx(-std::pow(p.alpha_s, 1 - m) * p.omega0 / 2).epsilon(1e-15));
    }
}

TEST_CASE("simred: f values and the constant-diffusion cubic") {
    auto p = fig1(0.0);
    CHECK(f_of_phi(0.0, p) == 0.0);
    CHECK(f_of_phi(0.125, p) == doctest::Approx(0.125 * 0.625 * 0.25 / 3).epsilon(1e-13));
    CHECK(cubic_root1(p) == 0.0);
    CHECK(cubic_root2(p) == doctest::Approx(0.875));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        ModelParams q = fig1(0.0);
        q.alpha_s = 0.1 + 0.8 * u(rng);
        q.omega0 = 0.5 + u(rng);
        q.q0 = 0.1 + u(rng);
        const double phi = phi_max(q) * u(rng);
        CHECK(f_of_phi(phi, q) == doctest::Approx(f_cubic(phi, q)).epsilon(1e-12));
    }
}

TEST_CASE("simred: exact profiles satisfy the reduced equations") {
    for (int n : {0, 1, 2}) {
        for (double m : {0.0, 0.5, 1.0}) {
            auto p = fig1(m, n);
            const auto f = exact_f(p), g = exact_g(p);
            double worst = 0;
            for (int i = 0; i < 200; ++i) {
                const double w = p.omega0 * i / 200.0;  // stays inside where psi > 0
                const auto r = reduced_residuals(exact_point(w, p), p, f, g);
                worst = std::max({worst, std::fabs(r.r1), std::fabs(r.r2)});
            }
            CAPTURE(n);
            CAPTURE(m);
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("simred: a wrong source leaves a residual") {
    auto p = fig1(1.0, 0);
    Source f = [&](double phi) { return 1.01 * f_of_phi(phi, p); };
    const auto r = reduced_residuals(exact_point(0.3, p), p, f, exact_g(p));
    CHECK(std::fabs(r.r1) > 1e-5);
}

TEST_CASE("simred: equilibrium has zero residuals and psi = 0 is rejected") {
    auto p = fig1();
    Source zero = [](double) { return 0.0; };
    ProfilePoint pt{0.4, 0, 0, 0, 0.7, 0, 0};
    const auto r = reduced_residuals(pt, p, zero, zero);
    CHECK(r.r1 == 0.0);
    CHECK(r.r2 == 0.0);
    pt.psi = 0;
    CHECK_THROWS_AS(reduced_residuals(pt, p, zero, zero), std::domain_error);
}

TEST_CASE("simred: exact fields") {
    auto p = fig1();
    CHECK(exact_fields(4.0, 0.0, p).R == doctest::Approx(2.0));
    for (double t : {0.5, 1.0, 3.0}) CHECK(exact_fields(t, 0.0, p).alpha == doctest::Approx(0.75));
    CHECK(exact_fields(1.0, 0.0, p).c == doctest::Approx(2.0 - 5 * 0.5 / 48).epsilon(1e-14));
    CHECK(exact_fields(2.0, std::sqrt(2.0), p).c == doctest::Approx(2.0));
    CHECK_THROWS_AS(exact_fields(1.0, 1.5, p), std::domain_error);
    CHECK_THROWS_AS(exact_fields(0.0, 0.0, p), std::domain_error);
}

TEST_CASE("rk45: exponential and harmonic oscillator") {
    Rhs f = [](double, const State& y, State& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    const auto r = integrate_rk45(f, {0.0, 1.0}, 0.0, 10.0);
    CHECK(r.y[0] == doctest::Approx(std::sin(10.0)).epsilon(1e-10));
    CHECK(r.y[1] == doctest::Approx(std::cos(10.0)).epsilon(1e-10));
    Rhs g = [](double, const State& y, State& dy) { dy[0] = -2.0 * y[0]; };
    CHECK(integrate_rk45(g, {1.0}, 0.0, 3.0).y[0] == doctest::Approx(std::exp(-6.0)).epsilon(1e-11));
    CHECK_THROWS_AS(integrate_rk45(g, {1.0}, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("simred: shooting recovers the closed-form solution") {
    struct Case {
        double m;
        int n;
        bool cubic;
    };
    for (const auto& c : {Case{1.0, 0, false}, Case{0.0, 0, false}, Case{1.0, 2, false}, Case{0.0, 2, false},
                          Case{0.0, 0, true}}) {
        auto p = fig1(c.m, c.n);
        const Source f = c.cubic ? Source([p](double phi) { return f_cubic(phi, p); }) : exact_f(p);
        const auto t0 = std::chrono::steady_clock::now();
        const ShootGuess guess{exact_phi(0, p) * 1.03, exact_psi(0, p) * 0.97, 1.02};
        const auto res = shoot_reduced(p, f, exact_g(p), guess);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CAPTURE(c.m);
        CAPTURE(c.n);
        CHECK(std::fabs(res.omega0 - 1.0) < 1e-6);
        CHECK(std::fabs(res.phi0 - exact_phi(0, p)) < 1e-6);
        CHECK(std::fabs(res.psi0 - exact_psi(0, p)) < 1e-6);
        CHECK(res.defect < 1e-10);
        double err = 0;
        for (std::size_t i = 0; i < res.profile.omega.size(); ++i) {
            const double w = std::min(res.profile.omega[i], p.omega0);
            err = std::max({err, std::fabs(res.profile.phi[i] - exact_phi(w, p)),
                            std::fabs(res.profile.psi[i] - exact_psi(w, p))});
        }
        CHECK(err < (c.cubic ? 1e-8 : 1e-6));
        CHECK(secs < 5.0);
    }
}
