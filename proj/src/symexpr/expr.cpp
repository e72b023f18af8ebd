#include "pesym/symexpr/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <stdexcept>

namespace pesym::symexpr {

std::string_view builtin_name(Builtin fn) {
    switch (fn) {
        case Builtin::Exp: return "exp";
        case Builtin::Ln: return "ln";
        case Builtin::Sin: return "sin";
        case Builtin::Cos: return "cos";
        case Builtin::Tan: return "tan";
        case Builtin::Sqrt: return "sqrt";
    }
    return "?";
}

namespace {

const Expr& zero_expr() {
    static const Expr z{std::make_shared<const Node>(Number{0.0})};
    return z;
}

template <class T>
Expr make(T&& value) {
    return Expr{std::make_shared<const Node>(std::forward<T>(value))};
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

Expr::Expr() : node_(zero_expr().node_) {}

bool Expr::is_number() const { return std::holds_alternative<Number>(*node_); }
bool Expr::is_number(double v) const {
    const auto* n = as<Number>();
    return n != nullptr && n->value == v;
}
double Expr::number() const { return std::get<Number>(*node_).value; }
bool Expr::is_var() const { return std::holds_alternative<Var>(*node_); }
bool Expr::is_var(std::string_view name) const {
    const auto* v = as<Var>();
    return v != nullptr && v->name == name;
}
const std::string& Expr::var_name() const { return std::get<Var>(*node_).name; }

namespace raw {
Expr number(double v) { return make(Number{v}); }
Expr var(std::string name) { return make(Var{std::move(name)}); }
Expr sum(std::vector<Expr> terms) { return make(Sum{std::move(terms)}); }
Expr product(std::vector<Expr> factors) { return make(Product{std::move(factors)}); }
Expr power(Expr base, Expr exponent) { return make(Power{std::move(base), std::move(exponent)}); }
Expr neg(Expr arg) { return make(Neg{std::move(arg)}); }
Expr quotient(Expr num, Expr den) { return make(Quotient{std::move(num), std::move(den)}); }
Expr call(Builtin fn, Expr arg) { return make(Call{fn, std::move(arg)}); }
Expr func(std::string name, int order, Expr arg) {
    if (order < 0) throw std::invalid_argument("negative derivative order for " + name);
    return make(FuncApp{std::move(name), order, std::move(arg)});
}
}  // namespace raw

bool equal(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return true;
    if (a.node().index() != b.node().index()) return false;
    auto same_list = [](const std::vector<Expr>& x, const std::vector<Expr>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (!equal(x[i], y[i])) return false;
        return true;
    };
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node());
            if constexpr (std::is_same_v<T, Number>) return na.value == nb.value;
            else if constexpr (std::is_same_v<T, Var>) return na.name == nb.name;
            else if constexpr (std::is_same_v<T, Sum>) return same_list(na.terms, nb.terms);
            else if constexpr (std::is_same_v<T, Product>) return same_list(na.factors, nb.factors);
            else if constexpr (std::is_same_v<T, Power>)
                return equal(na.base, nb.base) && equal(na.exponent, nb.exponent);
            else if constexpr (std::is_same_v<T, Neg>) return equal(na.arg, nb.arg);
            else if constexpr (std::is_same_v<T, Quotient>)
                return equal(na.num, nb.num) && equal(na.den, nb.den);
            else if constexpr (std::is_same_v<T, Call>) return na.fn == nb.fn && equal(na.arg, nb.arg);
            else return na.name == nb.name && na.order == nb.order && equal(na.arg, nb.arg);
        },
        a.node());
}

// ---------------------------------------------------------------------------
// Simplifying constructors

Expr num(double v) { return raw::number(v); }
Expr var(std::string name) { return raw::var(std::move(name)); }

namespace {

// Splits a term into numeric coefficient and core (core == nullopt means pure number).
std::pair<double, std::optional<Expr>> split_coefficient(const Expr& term) {
    if (term.is_number()) return {term.number(), std::nullopt};
    if (const auto* n = term.as<Neg>()) {
        auto [c, core] = split_coefficient(n->arg);
        return {-c, core};
    }
    if (const auto* p = term.as<Product>()) {
        if (!p->factors.empty() && p->factors.front().is_number()) {
            std::vector<Expr> rest(p->factors.begin() + 1, p->factors.end());
            if (rest.empty()) return {p->factors.front().number(), std::nullopt};
            Expr core = rest.size() == 1 ? rest.front() : raw::product(std::move(rest));
            return {p->factors.front().number(), core};
        }
    }
    return {1.0, term};
}

Expr scale(double c, const Expr& core) {
    if (c == 0.0) return num(0.0);
    if (c == 1.0) return core;
    if (const auto* p = core.as<Product>()) {
        std::vector<Expr> f;
        f.reserve(p->factors.size() + 1);
        f.push_back(num(c));
        f.insert(f.end(), p->factors.begin(), p->factors.end());
        return raw::product(std::move(f));
    }
    return raw::product({num(c), core});
}

}  // namespace

Expr sum(std::vector<Expr> terms) {
    // Flatten nested sums, distributing a numeric coefficient over them.
    std::vector<std::pair<double, Expr>> flat;
    flat.reserve(terms.size());
    std::vector<std::pair<double, Expr>> stack;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) stack.emplace_back(1.0, std::move(*it));
    while (!stack.empty()) {
        auto [c, t] = std::move(stack.back());
        stack.pop_back();
        auto [tc, core] = split_coefficient(t);
        if (core) {
            if (const auto* s = core->as<Sum>()) {
                for (auto it = s->terms.rbegin(); it != s->terms.rend(); ++it) stack.emplace_back(c * tc, *it);
                continue;
            }
        }
        flat.emplace_back(c, std::move(t));
    }
    double constant = 0.0;
    std::vector<std::pair<double, Expr>> collected;
    for (const auto& [outer, t] : flat) {
        auto [inner, core] = split_coefficient(t);
        const double c = outer * inner;
        if (!core) {
            constant += c;
            continue;
        }
        bool merged = false;
        for (auto& [cc, ce] : collected) {
            if (equal(ce, *core)) {
                cc += c;
                merged = true;
                break;
            }
        }
        if (!merged) collected.emplace_back(c, *core);
    }
    std::vector<Expr> out;
    for (const auto& [c, core] : collected)
        if (c != 0.0) out.push_back(scale(c, core));
    if (constant != 0.0) out.push_back(num(constant));
    if (out.empty()) return num(0.0);
    if (out.size() == 1) return out.front();
    return raw::sum(std::move(out));
}

Expr product(std::vector<Expr> factors) {
    double coefficient = 1.0;
    std::vector<Expr> out;
    std::vector<Expr> stack(factors.rbegin(), factors.rend());
    while (!stack.empty()) {
        Expr f = std::move(stack.back());
        stack.pop_back();
        if (f.is_number()) {
            coefficient *= f.number();
        } else if (const auto* p = f.as<Product>()) {
            for (auto it = p->factors.rbegin(); it != p->factors.rend(); ++it) stack.push_back(*it);
        } else if (const auto* n = f.as<Neg>()) {
            coefficient = -coefficient;
            stack.push_back(n->arg);
        } else {
            out.push_back(std::move(f));
        }
    }
    if (coefficient == 0.0) return num(0.0);
    if (out.empty()) return num(coefficient);
    if (coefficient != 1.0) out.insert(out.begin(), num(coefficient));
    if (out.size() == 1) return out.front();
    return raw::product(std::move(out));
}

Expr pow(Expr base, Expr exponent) {
    if (exponent.is_number(0.0)) return num(1.0);
    if (exponent.is_number(1.0)) return base;
    if (base.is_number(1.0)) return num(1.0);
    if (base.is_number() && exponent.is_number()) {
        double b = base.number(), e = exponent.number();
        if ((b > 0.0 || is_integer(e)) && !(b == 0.0 && e < 0.0)) {
            double r = std::pow(b, e);
            if (std::isfinite(r)) return num(r);
        }
    }
    if (base.is_number(0.0) && exponent.is_number() && exponent.number() > 0.0) return num(0.0);
    return raw::power(std::move(base), std::move(exponent));
}

Expr neg(Expr arg) { return product({num(-1.0), std::move(arg)}); }

Expr quotient(Expr n, Expr d) {
    if (d.is_number(1.0)) return n;
    if (n.is_number(0.0) && !d.is_number(0.0)) return num(0.0);
    if (d.is_number() && d.number() != 0.0) return product({num(1.0 / d.number()), std::move(n)});
    return raw::quotient(std::move(n), std::move(d));
}

Expr call(Builtin fn, Expr arg) {
    if (arg.is_number()) {
        double a = arg.number();
        double r = NAN;
        switch (fn) {
            case Builtin::Exp: r = std::exp(a); break;
            case Builtin::Ln: r = a > 0.0 ? std::log(a) : NAN; break;
            case Builtin::Sin: r = std::sin(a); break;
            case Builtin::Cos: r = std::cos(a); break;
            case Builtin::Tan: r = std::tan(a); break;
            case Builtin::Sqrt: r = a >= 0.0 ? std::sqrt(a) : NAN; break;
        }
        // Only fold exact-looking results so printed output stays readable.
        if (std::isfinite(r) && (a == 0.0 || (fn == Builtin::Ln && a == 1.0) ||
                                 (fn == Builtin::Sqrt && is_integer(r))))
            return num(r);
    }
    if (fn == Builtin::Ln) {
        if (const auto* c = arg.as<Call>(); c && c->fn == Builtin::Exp) return c->arg;
    }
    return raw::call(fn, std::move(arg));
}

Expr func(std::string name, int order, Expr arg) { return raw::func(std::move(name), order, std::move(arg)); }

Expr exp(Expr a) { return call(Builtin::Exp, std::move(a)); }
Expr ln(Expr a) { return call(Builtin::Ln, std::move(a)); }
Expr sin(Expr a) { return call(Builtin::Sin, std::move(a)); }
Expr cos(Expr a) { return call(Builtin::Cos, std::move(a)); }
Expr tan(Expr a) { return call(Builtin::Tan, std::move(a)); }
Expr sqrt(Expr a) { return call(Builtin::Sqrt, std::move(a)); }

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return quotient(a, b); }
Expr operator-(const Expr& a) { return neg(a); }

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecTerm = 2;
constexpr int kPrecFactor = 3;
constexpr int kPrecAtom = 5;

std::string format_number(double v) {
    char buf[64];
    for (int digits : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

bool negative_leading(const Expr& e) {
    if (e.is_number()) return e.number() < 0.0;
    if (e.as<Neg>()) return true;
    if (const auto* p = e.as<Product>())
        return !p->factors.empty() && p->factors.front().is_number() &&
               p->factors.front().number() < 0.0;
    return false;
}

// Returns the absolute-value form of a term with a leading minus.
Expr strip_sign(const Expr& e) {
    if (e.is_number()) return num(-e.number());
    if (const auto* n = e.as<Neg>()) return n->arg;
    const auto& f = e.as<Product>()->factors;
    double c = -f.front().number();
    std::vector<Expr> rest(f.begin() + 1, f.end());
    if (c != 1.0) rest.insert(rest.begin(), num(c));
    return rest.size() == 1 ? rest.front() : raw::product(std::move(rest));
}

void print_into(std::string& out, const Expr& e, int ctx);

int precedence(const Expr& e) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) return n.value < 0.0 ? kPrecFactor : kPrecAtom;
            else if constexpr (std::is_same_v<T, Sum>) return kPrecSum;
            else if constexpr (std::is_same_v<T, Product> || std::is_same_v<T, Quotient>) return kPrecTerm;
            else if constexpr (std::is_same_v<T, Neg>) return kPrecFactor;
            else if constexpr (std::is_same_v<T, Power>) return kPrecFactor + 1;
            else return kPrecAtom;
        },
        e.node());
}

void print_node(std::string& out, const Expr& e) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                out += format_number(n.value);
            } else if constexpr (std::is_same_v<T, Var>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Sum>) {
                for (std::size_t i = 0; i < n.terms.size(); ++i) {
                    const Expr& t = n.terms[i];
                    if (i == 0) {
                        print_into(out, t, kPrecSum);
                    } else if (negative_leading(t)) {
                        out += " - ";
                        print_into(out, strip_sign(t), kPrecTerm);
                    } else {
                        out += " + ";
                        print_into(out, t, kPrecTerm);
                    }
                }
            } else if constexpr (std::is_same_v<T, Product>) {
                std::size_t start = 0;
                if (!n.factors.empty() && n.factors.front().is_number(-1.0) && n.factors.size() > 1) {
                    out += "-";
                    start = 1;
                }
                for (std::size_t i = start; i < n.factors.size(); ++i) {
                    if (i > start) out += "*";
                    const Expr& f = n.factors[i];
                    // keep a*(b/c) grouped so evaluation order is preserved
                    int ctx = (i > start && f.as<Quotient>()) ? kPrecAtom : kPrecFactor;
                    print_into(out, f, ctx);
                }
            } else if constexpr (std::is_same_v<T, Power>) {
                print_into(out, n.base, kPrecAtom);
                out += "^";
                print_into(out, n.exponent, kPrecAtom);
            } else if constexpr (std::is_same_v<T, Neg>) {
                out += "-";
                print_into(out, n.arg, kPrecFactor);
            } else if constexpr (std::is_same_v<T, Quotient>) {
                print_into(out, n.num, kPrecTerm);
                out += "/";
                print_into(out, n.den, kPrecFactor + 1);
            } else if constexpr (std::is_same_v<T, Call>) {
                out += builtin_name(n.fn);
                out += "(";
                print_into(out, n.arg, kPrecSum);
                out += ")";
            } else {
                out += n.name;
                out.append(static_cast<std::size_t>(n.order), '\'');
                out += "(";
                print_into(out, n.arg, kPrecSum);
                out += ")";
            }
        },
        e.node());
}

void print_into(std::string& out, const Expr& e, int ctx) {
    int prec = precedence(e);
    // A product with a leading minus reads as a unary minus.
    if (prec == kPrecTerm && negative_leading(e) && ctx > kPrecTerm) prec = kPrecSum;
    if (prec < ctx) {
        out += "(";
        print_node(out, e);
        out += ")";
    } else {
        print_node(out, e);
    }
}

}  // namespace

std::string print(const Expr& e) {
    std::string out;
    print_into(out, e, kPrecSum);
    return out;
}

std::size_t tree_size(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::size_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number> || std::is_same_v<T, Var>) return 1;
            else if constexpr (std::is_same_v<T, Sum>) {
                std::size_t s = 1;
                for (const auto& t : n.terms) s += tree_size(t);
                return s;
            } else if constexpr (std::is_same_v<T, Product>) {
                std::size_t s = 1;
                for (const auto& t : n.factors) s += tree_size(t);
                return s;
            } else if constexpr (std::is_same_v<T, Power>) return 1 + tree_size(n.base) + tree_size(n.exponent);
            else if constexpr (std::is_same_v<T, Quotient>) return 1 + tree_size(n.num) + tree_size(n.den);
            else return 1 + tree_size(n.arg);
        },
        e.node());
}

}  // namespace pesym::symexpr
