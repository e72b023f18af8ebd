#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace pesym::simred {

using State = std::vector<double>;
using Rhs = std::function<void(double t, const State& y, State& dy)>;

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Rk45Options {
    double rtol = 1e-12;
    double atol = 1e-14;
    double h0 = 1e-4;
    double hmin = 1e-14;
    int max_steps = 200000;
};

/// Called after each accepted step; returning false rejects the step, halves it
/// and retries (used to keep components inside their domain).
using StepGuard = std::function<bool(double t, const State& y)>;

struct Rk45Result {
    State y;
    int steps = 0;
    int rejected = 0;
    std::vector<double> ts;       ///< accepted step ends, t0 included
    std::vector<State> ys;
};

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (t1 > t0), landing exactly on t1.
/// Throws IntegrationError when the step underflows or max_steps is exceeded.
Rk45Result integrate_rk45(const Rhs& f, State y0, double t0, double t1, const Rk45Options& opt = {},
                          const StepGuard& guard = {}, bool keep_trajectory = false);

}  // namespace pesym::simred
