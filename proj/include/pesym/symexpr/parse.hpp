#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pesym/symexpr/expr.hpp"

namespace pesym::symexpr {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Parses the expression grammar
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' atom)? | '-' factor
///   atom   := NUMBER | IDENT | IDENT '\''* '(' expr ')' | '(' expr ')'
///
/// IDENT followed by '(' is a builtin (exp, ln, sin, cos, tan, sqrt) or an
/// uninterpreted unary function whose derivative order is the number of primes.
/// The tree is built without simplification; only Sum/Product chains are flattened.
Expr parse(std::string_view src);

}  // namespace pesym::symexpr
