#pragma once

#include <string>
#include <vector>

#include "pesym/liealg/system.hpp"
#include "pesym/symexpr/jet.hpp"

namespace pesym::liealg {

/// Coefficients of the second prolongation that the invariance conditions need.
struct Prolongation {
    Expr rho_t_1;
    Expr rho_x_1;
    Expr rho_x_2;
    Expr sigma_xx_1;
    Expr sigma_xx_2;
};

/// rho_x^a = D_x eta^a - u^a_x D_x xi1,  rho_t^1 = D_t eta1 - U_t xi0_t - U_x xi1_t,
/// sigma_xx^a = D_x rho_x^a - u^a_xx D_x xi1. Rejects generators outside the class.
Prolongation prolong2(const Generator& g, const symexpr::JetContext& ctx = symexpr::JetContext::standard());

struct InvarianceResiduals {
    Expr s1;
    Expr s2;
};

/// X_2(S_1), X_2(S_2) restricted to the manifold S_1 = S_2 = 0. Throws
/// symexpr::JetError if V_t survives the restriction.
InvarianceResiduals invariance_residuals(const PESystem& sys, const Generator& g);

struct DeterminingResidual {
    int equation;       ///< 13..20
    std::string label;  ///< which constraint of that equation
    Expr residual;
};

/// Left minus right of every constraint of the determining system. Planar systems
/// with non-constant D only; throws std::domain_error otherwise.
std::vector<DeterminingResidual> determining_residuals(const PESystem& sys, const Generator& g);

struct CommutatorResult {
    Generator value;
    bool in_class = true;
    std::string violation;
};

/// [X1, X2] with components X1(c2) - X2(c1), X acting as a first-order operator.
CommutatorResult commutator(const Generator& a, const Generator& b);

/// Applies the first-order operator of g to a function of (t, x, U, V).
Expr apply_operator(const Generator& g, const Expr& e);

}  // namespace pesym::liealg
