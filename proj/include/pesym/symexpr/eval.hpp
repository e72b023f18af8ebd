#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pesym/symexpr/expr.hpp"

namespace pesym::symexpr {

/// Stand-in for an uninterpreted unary function: value of the `order`-th derivative at `arg`.
using FunctionBinding = std::function<double(int order, double arg)>;
using FunctionTable = std::map<std::string, FunctionBinding, std::less<>>;
using Point = std::map<std::string, double, std::less<>>;

/// Raised for unbound names and for points outside an operation's domain
/// (ln of a non-positive number, fractional power of a negative base, ...).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalResult {
    double value = 0.0;
    /// Largest |value| of any subterm met while evaluating; the natural size of
    /// rounding error in `value`.
    double scale = 0.0;
};

EvalResult evaluate_scaled(const Expr& e, const Point& point, const FunctionTable& functions = {});
double evaluate(const Expr& e, const Point& point, const FunctionTable& functions = {});

// Stand-in constructors. All derivative orders are exact.
FunctionBinding polynomial_binding(std::vector<double> coefficients);
FunctionBinding exponential_binding(double amplitude, double rate);
FunctionBinding power_binding(double exponent);  ///< x^p (x > 0 for fractional p)
FunctionBinding sine_binding(double frequency);
/// Random smooth stand-in: a degree <= 3 polynomial with coefficients in [-2, 2],
/// or a*exp(c*x) with a, c in [-2, 2] (a kept away from 0). `variant` picks the kind.
FunctionBinding random_standin(std::mt19937_64& rng, int variant);
/// The sample functions t, t^2, exp(t) used for arbitrary functions of time.
FunctionBinding time_sample(int which);
std::string time_sample_label(int which);

}  // namespace pesym::symexpr
