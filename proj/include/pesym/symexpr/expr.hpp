#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pesym::symexpr {

enum class Builtin { Exp, Ln, Sin, Cos, Tan, Sqrt };

std::string_view builtin_name(Builtin fn);

struct Node;

/// Immutable handle to an expression tree node. Copies share structure.
class Expr {
public:
    Expr();  // the number 0
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node& node() const { return *node_; }
    const Node* get() const { return node_.get(); }

    bool is_number() const;
    bool is_number(double v) const;
    /// Value of a Number node; undefined for other kinds.
    double number() const;
    bool is_var() const;
    bool is_var(std::string_view name) const;
    const std::string& var_name() const;

    template <class T>
    const T* as() const;

private:
    std::shared_ptr<const Node> node_;
};

struct Number {
    double value;
};
struct Var {
    std::string name;
};
struct Sum {
    std::vector<Expr> terms;
};
struct Product {
    std::vector<Expr> factors;
};
struct Power {
    Expr base;
    Expr exponent;
};
struct Neg {
    Expr arg;
};
struct Quotient {
    Expr num;
    Expr den;
};
struct Call {
    Builtin fn;
    Expr arg;
};
/// Uninterpreted unary function `name` differentiated `order` times, applied to `arg`.
struct FuncApp {
    std::string name;
    int order;
    Expr arg;
};

struct Node : std::variant<Number, Var, Sum, Product, Power, Neg, Quotient, Call, FuncApp> {
    using variant::variant;
};

template <class T>
const T* Expr::as() const {
    return std::get_if<T>(node_.get());
}

// Raw constructors: build exactly the requested node, no simplification.
namespace raw {
Expr number(double v);
Expr var(std::string name);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(Expr base, Expr exponent);
Expr neg(Expr arg);
Expr quotient(Expr num, Expr den);
Expr call(Builtin fn, Expr arg);
Expr func(std::string name, int order, Expr arg);
}  // namespace raw

// Simplifying constructors: constant folding, 0/1 identities, flattening of
// Sum/Product and collection of numerically-scaled like terms in sums.
Expr num(double v);
Expr var(std::string name);
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr pow(Expr base, Expr exponent);
Expr neg(Expr arg);
Expr quotient(Expr num, Expr den);
Expr call(Builtin fn, Expr arg);
Expr func(std::string name, int order, Expr arg);

Expr exp(Expr a);
Expr ln(Expr a);
Expr sin(Expr a);
Expr cos(Expr a);
Expr tan(Expr a);
Expr sqrt(Expr a);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
inline Expr operator+(const Expr& a, double b) { return a + num(b); }
inline Expr operator+(double a, const Expr& b) { return num(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - num(b); }
inline Expr operator-(double a, const Expr& b) { return num(a) - b; }
inline Expr operator*(const Expr& a, double b) { return a * num(b); }
inline Expr operator*(double a, const Expr& b) { return num(a) * b; }
inline Expr operator/(const Expr& a, double b) { return a / num(b); }
inline Expr operator/(double a, const Expr& b) { return num(a) / b; }
inline Expr pow(const Expr& a, double e) { return pow(a, num(e)); }

/// Deep structural equality.
bool equal(const Expr& a, const Expr& b);

/// Renders `e` in the input grammar; parse(print(e)) evaluates identically to e.
std::string print(const Expr& e);

/// Number of nodes, counting shared subtrees once per occurrence.
std::size_t tree_size(const Expr& e);

}  // namespace pesym::symexpr
