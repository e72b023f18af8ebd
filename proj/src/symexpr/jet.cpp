#include "pesym/symexpr/jet.hpp"

#include <algorithm>
#include <cmath>

namespace pesym::symexpr {

JetContext JetContext::standard() {
    JetContext ctx;
    ctx.base = {"t", "x"};
    ctx.dependent = {"U", "V"};
    ctx.jets = {
        {{"U", "t"}, "U_t"}, {{"V", "t"}, "V_t"},   {{"U", "x"}, "U_x"},
        {{"V", "x"}, "V_x"}, {{"U_x", "x"}, "U_xx"}, {{"V_x", "x"}, "V_xx"},
    };
    return ctx;
}

bool JetContext::is_coordinate(std::string_view name) const {
    for (const auto& b : base)
        if (b == name) return true;
    for (const auto& d : dependent)
        if (d == name) return true;
    for (const auto& [key, value] : jets)
        if (value == name) return true;
    return false;
}

std::optional<std::string> JetContext::jet(std::string_view coordinate, std::string_view direction) const {
    auto it = jets.find({std::string(coordinate), std::string(direction)});
    if (it == jets.end()) return std::nullopt;
    return it->second;
}

std::set<std::string> JetContext::coordinates() const {
    std::set<std::string> out(base.begin(), base.end());
    out.insert(dependent.begin(), dependent.end());
    for (const auto& [key, value] : jets) out.insert(value);
    return out;
}

Expr total_derivative(const Expr& e, std::string_view w, const JetContext& ctx) {
    std::vector<Expr> terms{pdiff(e, w)};
    for (const auto& name : free_vars(e)) {
        if (name == w || !ctx.is_coordinate(name)) continue;
        bool is_base = std::find(ctx.base.begin(), ctx.base.end(), name) != ctx.base.end();
        if (is_base) continue;
        auto next = ctx.jet(name, w);
        if (!next)
            throw JetError("total derivative D_" + std::string(w) + " of " + name +
                           " leaves the jet space of this context");
        terms.push_back(var(*next) * pdiff(e, name));
    }
    return sum(std::move(terms));
}

namespace {

std::vector<std::string> sampled_vars(const std::vector<Expr>& es, const JetContext& ctx) {
    std::set<std::string> names;
    for (const auto& e : es) {
        auto fv = free_vars(e);
        names.insert(fv.begin(), fv.end());
    }
    std::vector<std::string> out;
    for (const auto& n : names)
        if (!ctx.fixed.contains(n)) out.push_back(n);
    return out;
}

}  // namespace

std::vector<ZeroTestResult> is_zero_all(const std::vector<Expr>& es, const JetContext& ctx,
                                        const ZeroTestOptions& opt) {
    if (opt.trials < 8) throw std::invalid_argument("is_zero needs at least 8 trials");
    std::vector<ZeroTestResult> results(es.size());
    const auto names = sampled_vars(es, ctx);
    std::mt19937_64 rng(opt.seed);
    Point point = ctx.fixed;

    for (int trial = 0; trial < opt.trials; ++trial) {
        int attempts = 0;
        for (;;) {
            for (const auto& n : names) {
                auto win = ctx.windows.find(n);
                auto [lo, hi] = win == ctx.windows.end() ? std::pair{0.3, 2.0} : win->second;
                point[n] = std::uniform_real_distribution<double>(lo, hi)(rng);
            }
            std::vector<EvalResult> values;
            values.reserve(es.size());
            try {
                for (const auto& e : es) values.push_back(evaluate_scaled(e, point, ctx.functions));
            } catch (const EvalError& err) {
                if (++attempts > opt.max_resamples_per_trial)
                    throw EvalError(std::string("is_zero: no admissible sample point found (") +
                                    err.what() + ")");
                continue;
            }
            for (std::size_t i = 0; i < es.size(); ++i) {
                double ratio = std::fabs(values[i].value) / (1.0 + values[i].scale);
                auto& r = results[i];
                ++r.points;
                if (ratio >= r.worst_ratio || r.witness.empty()) {
                    r.worst_ratio = ratio;
                    r.worst_value = values[i].value;
                    r.witness = point;
                }
                if (!(ratio < opt.tol)) r.zero = false;
            }
            break;
        }
    }
    return results;
}

ZeroTestResult is_zero(const Expr& e, const JetContext& ctx, const ZeroTestOptions& opt) {
    return is_zero_all({e}, ctx, opt).front();
}

}  // namespace pesym::symexpr
