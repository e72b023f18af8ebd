#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pesym/simred/simred.hpp"

namespace pesym::fbsolve {

using simred::ModelParams;

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sources of the moving-boundary problem as functions of the original
/// concentrations (alpha, c).
struct Sources {
    std::function<double(double alpha, double c)> S;
    std::function<double(double alpha, double c)> Q;
    bool q_depends_on_c = true;
    bool exact_compatible = false;  ///< the closed-form solution solves this problem
    std::string label;
};

/// S = f(alpha - alpha_s)/(c_inf - c), Q = q0 (alpha - alpha_s) with f matching the
/// closed-form profile; `cubic` selects the constant-diffusion cubic (m = 0 only).
Sources exact_sources(const ModelParams& p, bool cubic = false);
/// Sources parsed from expressions in alpha and c (parameters may be bound in `constants`).
Sources parsed_sources(const std::string& S, const std::string& Q,
                       const std::vector<std::pair<std::string, double>>& constants = {});
Sources zero_sources();

struct SolverConfig {
    int N = 200;
    double sigma = 0.4;  ///< safety factor on the diffusive step limit
    double t0 = 1.0;
    double t_end = 2.0;
    double output_every = 0.0;  ///< snapshot spacing in t; 0 keeps only the first and last
    Sources sources;

    void validate() const;
};

/// y_i = i / N in [0, 1], r = y s; U_N = V_N = 0.
struct FrontFixedState {
    double t = 0.0;
    double s = 0.0;
    double sdot = 0.0;  ///< front speed from the last evaluation of the Stefan condition
    std::vector<double> U;
    std::vector<double> V;
    int clipped = 0;  ///< negative U values set to zero so far

    int N() const { return static_cast<int>(U.size()) - 1; }
    double y(int i) const { return static_cast<double>(i) / N(); }
};

FrontFixedState init_from_exact(double t0, const ModelParams& p, const SolverConfig& cfg);

/// Solves V_yy + (n/y) V_y = -s^2 Q(alpha, c) with V_y(0) = 0, V(1) = 0, holding U fixed.
/// Iterates to 1e-12 when Q depends on c.
void elliptic_solve(FrontFixedState& state, const ModelParams& p, const SolverConfig& cfg);

/// Front speed -alpha_s^(m-1) U_y(1) / s from a one-sided second-order difference.
double front_speed(const FrontFixedState& state, const ModelParams& p);

/// Stable step size for the current state.
double step_size(const FrontFixedState& state, const ModelParams& p, const SolverConfig& cfg);

/// One Heun step of size dt (elliptic solve refreshed at each stage).
FrontFixedState step(const FrontFixedState& state, const ModelParams& p, const SolverConfig& cfg, double dt);

struct ErrorReport {
    int N = 0;
    double t_final = 0.0;
    double err_alpha_sup = 0.0;
    double err_c_sup = 0.0;
    double err_front = 0.0;
    std::optional<double> observed_order;
};

struct RunResult {
    std::vector<FrontFixedState> snapshots;
    FrontFixedState final_state;
    int steps = 0;
    std::optional<ErrorReport> error;  ///< present for exact-compatible sources
};

RunResult run(const ModelParams& p, const SolverConfig& cfg);

/// Sup-norm errors against the closed-form solution in the front-fixed coordinate.
ErrorReport compare_with_exact(const FrontFixedState& state, const ModelParams& p);

/// Runs each N in turn and fills observed_order from consecutive pairs (on alpha).
std::vector<ErrorReport> convergence_ladder(const ModelParams& p, SolverConfig cfg, const std::vector<int>& Ns);

/// Columns t, s, y, r, U, V, alpha, c; one row per node.
void write_snapshot_csv(std::ostream& out, const FrontFixedState& state, const ModelParams& p, bool header = true);

}  // namespace pesym::fbsolve
