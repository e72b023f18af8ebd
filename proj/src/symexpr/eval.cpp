#include "pesym/symexpr/eval.hpp"

#include <algorithm>
#include <cmath>

namespace pesym::symexpr {

namespace {

struct Evaluator {
    const Point& point;
    const FunctionTable& functions;
    double scale = 0.0;

    double note(double v) {
        if (!std::isfinite(v)) throw EvalError("non-finite intermediate value");
        scale = std::max(scale, std::fabs(v));
        return v;
    }

    double operator()(const Expr& e) {
        return std::visit([&](const auto& n) { return note(eval(n)); }, e.node());
    }

    double eval(const Number& n) { return n.value; }
    double eval(const Var& n) {
        auto it = point.find(n.name);
        if (it == point.end()) throw EvalError("unbound variable " + n.name);
        return it->second;
    }
    double eval(const Sum& n) {
        double s = 0.0;
        for (const auto& t : n.terms) s += (*this)(t);
        return s;
    }
    double eval(const Product& n) {
        double p = 1.0;
        for (const auto& f : n.factors) p *= (*this)(f);
        return p;
    }
    double eval(const Power& n) {
        double b = (*this)(n.base);
        double x = (*this)(n.exponent);
        if (b < 0.0 && std::floor(x) != x) throw EvalError("fractional power of negative base");
        if (b == 0.0 && x < 0.0) throw EvalError("negative power of zero");
        return std::pow(b, x);
    }
    double eval(const Neg& n) { return -(*this)(n.arg); }
    double eval(const Quotient& n) {
        double a = (*this)(n.num);
        double b = (*this)(n.den);
        if (b == 0.0) throw EvalError("division by zero");
        return a / b;
    }
    double eval(const Call& n) {
        double a = (*this)(n.arg);
        switch (n.fn) {
            case Builtin::Exp: return std::exp(a);
            case Builtin::Ln:
                if (a <= 0.0) throw EvalError("ln of non-positive value");
                return std::log(a);
            case Builtin::Sin: return std::sin(a);
            case Builtin::Cos: return std::cos(a);
            case Builtin::Tan: return std::tan(a);
            case Builtin::Sqrt:
                if (a < 0.0) throw EvalError("sqrt of negative value");
                return std::sqrt(a);
        }
        return NAN;
    }
    double eval(const FuncApp& n) {
        auto it = functions.find(n.name);
        if (it == functions.end()) throw EvalError("unbound function " + n.name);
        double a = (*this)(n.arg);
        return it->second(n.order, a);
    }
};

}  // namespace

EvalResult evaluate_scaled(const Expr& e, const Point& point, const FunctionTable& functions) {
    Evaluator ev{point, functions};
    double v = ev(e);
    return {v, ev.scale};
}

double evaluate(const Expr& e, const Point& point, const FunctionTable& functions) {
    return evaluate_scaled(e, point, functions).value;
}

FunctionBinding polynomial_binding(std::vector<double> c) {
    return [c = std::move(c)](int order, double x) {
        double s = 0.0;
        for (std::size_t i = static_cast<std::size_t>(order); i < c.size(); ++i) {
            double falling = 1.0;
            for (int j = 0; j < order; ++j) falling *= static_cast<double>(i) - j;
            s += c[i] * falling * std::pow(x, static_cast<double>(i) - order);
        }
        return s;
    };
}

FunctionBinding exponential_binding(double amplitude, double rate) {
    return [=](int order, double x) { return amplitude * std::pow(rate, order) * std::exp(rate * x); };
}

FunctionBinding power_binding(double p) {
    return [=](int order, double x) {
        double falling = 1.0;
        for (int j = 0; j < order; ++j) falling *= p - j;
        if (falling == 0.0) return 0.0;
        if (x < 0.0 && std::floor(p) != p) throw EvalError("fractional power of negative argument");
        return falling * std::pow(x, p - order);
    };
}

FunctionBinding sine_binding(double w) {
    return [=](int order, double x) {
        double amp = std::pow(w, order);
        switch (order % 4) {
            case 0: return amp * std::sin(w * x);
            case 1: return amp * std::cos(w * x);
            case 2: return -amp * std::sin(w * x);
            default: return -amp * std::cos(w * x);
        }
    };
}

FunctionBinding random_standin(std::mt19937_64& rng, int variant) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    auto away_from_zero = [&] {
        double a = coef(rng);
        return a < 0.0 ? a - 0.25 : a + 0.25;
    };
    if (variant % 3 == 2) return exponential_binding(away_from_zero(), coef(rng));
    std::vector<double> c(4);
    for (auto& x : c) x = coef(rng);
    // keep the polynomial genuinely nonlinear so derivative terms are exercised
    c[2] = away_from_zero();
    if (variant % 3 == 1) c[3] = away_from_zero();
    else c[3] = 0.0;
    return polynomial_binding(std::move(c));
}

FunctionBinding time_sample(int which) {
    switch (((which % 3) + 3) % 3) {
        case 0: return polynomial_binding({0.0, 1.0});
        case 1: return polynomial_binding({0.0, 0.0, 1.0});
        default: return exponential_binding(1.0, 1.0);
    }
}

std::string time_sample_label(int which) {
    switch (((which % 3) + 3) % 3) {
        case 0: return "t";
        case 1: return "t^2";
        default: return "exp(t)";
    }
}

}  // namespace pesym::symexpr
