#pragma once

#include <stdexcept>
#include <string>

#include "pesym/symexpr/calculus.hpp"
#include "pesym/symexpr/expr.hpp"

namespace pesym::liealg {

using symexpr::Expr;

class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// U_t = x^-n (x^n D(U) U_x)_x + F(U, V),  0 = x^-n (x^n V_x)_x + G(U, V).
/// n = 0 is the planar class; n = 1, 2 are the radial forms with x playing r.
struct PESystem {
    Expr D;
    Expr F;
    Expr G;
    int radial = 0;

    static PESystem parse(std::string_view d, std::string_view f, std::string_view g, int radial = 0);

    /// Throws InvariantError if a coefficient mentions t, x or a jet coordinate,
    /// if D depends on V, or if D is the literal 0.
    void validate() const;

    /// S1 = U_t - x^-n (x^n D U_x)_x - F as an expression on the second-order jet space.
    Expr s1() const;
    /// S2 = V_xx + (n/x) V_x + G.
    Expr s2() const;
    /// {U_t -> solved from S1 = 0, V_xx -> solved from S2 = 0}.
    symexpr::Bindings manifold() const;

    PESystem substituted(const symexpr::Bindings& b) const;
    std::string describe() const;
};

/// X = xi0 d_t + xi1 d_x + eta1 d_U + eta2 d_V.
struct Generator {
    Expr xi0;
    Expr xi1;
    Expr eta1;
    Expr eta2;

    static Generator parse(std::string_view xi0, std::string_view xi1, std::string_view eta1,
                           std::string_view eta2);
    /// Parses "xi0 ; xi1 ; eta1 ; eta2".
    static Generator parse_tuple(std::string_view tuple);

    /// Empty string when the generator belongs to the class handled here:
    /// xi0(t), xi1(t, x), eta1(t, x, U), eta2(t, x, V) affine in V.
    std::string class_violation() const;
    void validate() const;

    Generator substituted(const symexpr::Bindings& b) const;
    Generator scaled(const Expr& c) const;
    std::string describe() const;
};

Generator operator+(const Generator& a, const Generator& b);

/// The trivial algebra: d_t and d_x.
Generator translation_t();
Generator translation_x();

}  // namespace pesym::liealg
