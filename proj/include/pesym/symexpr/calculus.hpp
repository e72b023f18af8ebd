#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "pesym/symexpr/expr.hpp"

namespace pesym::symexpr {

using Bindings = std::map<std::string, Expr, std::less<>>;

/// Partial derivative with respect to the variable `v`. Every other Var is a
/// constant, jet coordinates included. FuncApp differentiates by the chain rule.
Expr pdiff(const Expr& e, std::string_view v);

/// Simultaneous replacement of variables. Replacement expressions are not
/// themselves rewritten, so {U: V, V: U} swaps.
Expr substitute(const Expr& e, const Bindings& bindings);

using FunctionRenames = std::map<std::string, std::string, std::less<>>;

/// Renames uninterpreted functions, keeping derivative orders and arguments.
Expr rename_functions(const Expr& e, const FunctionRenames& renames);

/// Re-applies the simplifying constructors bottom-up.
Expr simplify(const Expr& e);

std::set<std::string> free_vars(const Expr& e);
bool depends_on(const Expr& e, std::string_view v);
/// Names of uninterpreted functions referenced anywhere in `e`.
std::set<std::string> function_names(const Expr& e);

}  // namespace pesym::symexpr
