#include "pesym/symexpr/calculus.hpp"

#include <vector>

namespace pesym::symexpr {

Expr pdiff(const Expr& e, std::string_view v) {
    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return num(0.0);
            } else if constexpr (std::is_same_v<T, Var>) {
                return num(n.name == v ? 1.0 : 0.0);
            } else if constexpr (std::is_same_v<T, Sum>) {
                std::vector<Expr> terms;
                terms.reserve(n.terms.size());
                for (const auto& t : n.terms) terms.push_back(pdiff(t, v));
                return sum(std::move(terms));
            } else if constexpr (std::is_same_v<T, Product>) {
                std::vector<Expr> terms;
                for (std::size_t i = 0; i < n.factors.size(); ++i) {
                    Expr d = pdiff(n.factors[i], v);
                    if (d.is_number(0.0)) continue;
                    std::vector<Expr> f = n.factors;
                    f[i] = d;
                    terms.push_back(product(std::move(f)));
                }
                return sum(std::move(terms));
            } else if constexpr (std::is_same_v<T, Power>) {
                Expr db = pdiff(n.base, v);
                if (!depends_on(n.exponent, v)) {
                    if (db.is_number(0.0)) return num(0.0);
                    return product({n.exponent, pow(n.base, n.exponent - num(1.0)), db});
                }
                Expr de = pdiff(n.exponent, v);
                Expr self = pow(n.base, n.exponent);
                if (db.is_number(0.0)) return product({self, ln(n.base), de});
                return self * (de * ln(n.base) + n.exponent * db / n.base);
            } else if constexpr (std::is_same_v<T, Neg>) {
                return neg(pdiff(n.arg, v));
            } else if constexpr (std::is_same_v<T, Quotient>) {
                Expr dn = pdiff(n.num, v);
                Expr dd = pdiff(n.den, v);
                if (dd.is_number(0.0)) return dn / n.den;
                return (dn * n.den - n.num * dd) / pow(n.den, num(2.0));
            } else if constexpr (std::is_same_v<T, Call>) {
                Expr da = pdiff(n.arg, v);
                if (da.is_number(0.0)) return num(0.0);
                switch (n.fn) {
                    case Builtin::Exp: return exp(n.arg) * da;
                    case Builtin::Ln: return da / n.arg;
                    case Builtin::Sin: return cos(n.arg) * da;
                    case Builtin::Cos: return neg(sin(n.arg) * da);
                    case Builtin::Tan: return (num(1.0) + pow(tan(n.arg), num(2.0))) * da;
                    case Builtin::Sqrt: return da / (num(2.0) * sqrt(n.arg));
                }
                return num(0.0);
            } else {
                Expr da = pdiff(n.arg, v);
                if (da.is_number(0.0)) return num(0.0);
                return func(n.name, n.order + 1, n.arg) * da;
            }
        },
        e.node());
}

namespace {

Expr rewrite(const Expr& e, const Bindings& bindings, const FunctionRenames& renames) {
    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return e;
            } else if constexpr (std::is_same_v<T, Var>) {
                auto it = bindings.find(n.name);
                return it == bindings.end() ? e : it->second;
            } else if constexpr (std::is_same_v<T, Sum>) {
                std::vector<Expr> terms;
                terms.reserve(n.terms.size());
                for (const auto& t : n.terms) terms.push_back(rewrite(t, bindings, renames));
                return sum(std::move(terms));
            } else if constexpr (std::is_same_v<T, Product>) {
                std::vector<Expr> f;
                f.reserve(n.factors.size());
                for (const auto& t : n.factors) f.push_back(rewrite(t, bindings, renames));
                return product(std::move(f));
            } else if constexpr (std::is_same_v<T, Power>) {
                return pow(rewrite(n.base, bindings, renames), rewrite(n.exponent, bindings, renames));
            } else if constexpr (std::is_same_v<T, Neg>) {
                return neg(rewrite(n.arg, bindings, renames));
            } else if constexpr (std::is_same_v<T, Quotient>) {
                return quotient(rewrite(n.num, bindings, renames), rewrite(n.den, bindings, renames));
            } else if constexpr (std::is_same_v<T, Call>) {
                return call(n.fn, rewrite(n.arg, bindings, renames));
            } else {
                auto it = renames.find(n.name);
                return func(it == renames.end() ? n.name : it->second, n.order, rewrite(n.arg, bindings, renames));
            }
        },
        e.node());
}

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) { return rewrite(e, bindings, {}); }

Expr rename_functions(const Expr& e, const FunctionRenames& renames) { return rewrite(e, {}, renames); }

Expr simplify(const Expr& e) { return substitute(e, {}); }

namespace {

template <class Fn>
void walk(const Expr& e, Fn&& fn) {
    fn(e);
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Sum>) {
                for (const auto& t : n.terms) walk(t, fn);
            } else if constexpr (std::is_same_v<T, Product>) {
                for (const auto& t : n.factors) walk(t, fn);
            } else if constexpr (std::is_same_v<T, Power>) {
                walk(n.base, fn);
                walk(n.exponent, fn);
            } else if constexpr (std::is_same_v<T, Quotient>) {
                walk(n.num, fn);
                walk(n.den, fn);
            } else if constexpr (std::is_same_v<T, Neg> || std::is_same_v<T, Call> ||
                                 std::is_same_v<T, FuncApp>) {
                walk(n.arg, fn);
            }
        },
        e.node());
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& x) {
        if (const auto* v = x.as<Var>()) out.insert(v->name);
    });
    return out;
}

bool depends_on(const Expr& e, std::string_view v) {
    bool found = false;
    walk(e, [&](const Expr& x) {
        if (!found && x.is_var(v)) found = true;
    });
    return found;
}

std::set<std::string> function_names(const Expr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& x) {
        if (const auto* f = x.as<FuncApp>()) out.insert(f->name);
    });
    return out;
}

}  // namespace pesym::symexpr
