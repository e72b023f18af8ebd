#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pesym/symexpr/calculus.hpp"
#include "pesym/symexpr/eval.hpp"

namespace pesym::symexpr {

class JetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Coordinates of a finite jet space, the rule that maps (coordinate, direction)
/// to the next jet coordinate, and the bindings used to evaluate expressions on it.
struct JetContext {
    std::vector<std::string> base;       ///< independent variables, e.g. t, x
    std::vector<std::string> dependent;  ///< U, V
    /// (coordinate, direction) -> derivative coordinate. Coordinates with no entry
    /// for a direction cannot be differentiated further in that direction.
    std::map<std::pair<std::string, std::string>, std::string> jets;

    FunctionTable functions;
    /// Sampling window per variable; anything unlisted is drawn from [0.3, 2.0].
    std::map<std::string, std::pair<double, double>, std::less<>> windows;
    /// Values held fixed during sampling (parameters, for instance).
    Point fixed;

    /// t, x, U, V with U_t, V_t, U_x, V_x, U_xx, V_xx.
    static JetContext standard();

    bool is_coordinate(std::string_view name) const;
    std::optional<std::string> jet(std::string_view coordinate, std::string_view direction) const;
    std::set<std::string> coordinates() const;
};

/// D_w(e) = de/dw + sum over coordinates c of (c)_w * de/dc.
/// Throws JetError when e depends on a coordinate whose w-derivative is not in ctx.
Expr total_derivative(const Expr& e, std::string_view w, const JetContext& ctx);

struct ZeroTestOptions {
    int trials = 12;
    double tol = 1e-9;
    std::uint64_t seed = 0x5eed;
    int max_resamples_per_trial = 50;
};

struct ZeroTestResult {
    bool zero = true;
    /// Largest |value| / (1 + scale) over the sampled points.
    double worst_ratio = 0.0;
    double worst_value = 0.0;
    /// The point where the ratio peaked; for a failed test this is the witness.
    Point witness;
    int points = 0;
};

/// Probabilistic identity test: samples the free variables of `e` (except those in
/// ctx.fixed) and reports whether |e| / (1 + largest subterm) < tol everywhere.
/// Points where evaluation leaves its domain are redrawn; persistent failure throws EvalError.
ZeroTestResult is_zero(const Expr& e, const JetContext& ctx, const ZeroTestOptions& opt = {});

/// Same test applied jointly to several expressions at shared sample points.
std::vector<ZeroTestResult> is_zero_all(const std::vector<Expr>& es, const JetContext& ctx,
                                        const ZeroTestOptions& opt = {});

}  // namespace pesym::symexpr
