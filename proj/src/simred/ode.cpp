#include "pesym/simred/ode.hpp"

#include <algorithm>
#include <cmath>

namespace pesym::simred {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

}  // namespace

Rk45Result integrate_rk45(const Rhs& f, State y, double t0, double t1, const Rk45Options& opt, const StepGuard& guard,
                          bool keep_trajectory) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate_rk45 needs t1 > t0");
    const std::size_t n = y.size();
    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
    Rk45Result res;
    if (keep_trajectory) {
        res.ts.push_back(t0);
        res.ys.push_back(y);
    }
    double t = t0;
    double h = std::min(opt.h0, t1 - t0);
    f(t, y, k1);
    auto stage = [&](std::initializer_list<std::pair<double, const State*>> terms, State& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = y[i];
            for (const auto& [a, k] : terms) s += h * a * (*k)[i];
            out[i] = s;
        }
    };
    while (t < t1) {
        if (res.steps + res.rejected > opt.max_steps) throw IntegrationError("rk45: too many steps");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        stage({{a21, &k1}}, tmp);
        f(t + c2 * h, tmp, k2);
        stage({{a31, &k1}, {a32, &k2}}, tmp);
        f(t + c3 * h, tmp, k3);
        stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}, tmp);
        f(t + c4 * h, tmp, k4);
        stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, tmp);
        f(t + c5 * h, tmp, k5);
        stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, tmp);
        f(t + h, tmp, k6);
        stage({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, y5);
        const double tn = last ? t1 : t + h;
        f(tn, y5, k7);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
            err = std::max(err, std::fabs(e) / sc);
            finite = finite && std::isfinite(y5[i]) && std::isfinite(k7[i]);
        }
        const bool accept = finite && err <= 1.0 && (!guard || guard(tn, y5));
        if (accept) {
            t = tn;
            y = y5;
            k1 = k7;
            ++res.steps;
            if (keep_trajectory) {
                res.ts.push_back(t);
                res.ys.push_back(y);
            }
            const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            ++res.rejected;
            const double shrink = (finite && err > 1.0) ? 0.9 * std::pow(err, -0.2) : 0.5;
            h *= std::clamp(shrink, 0.1, 0.5);
        }
        if (h < opt.hmin) throw IntegrationError("rk45: step size underflow at t = " + std::to_string(t));
    }
    res.y = y;
    return res;
}

}  // namespace pesym::simred
