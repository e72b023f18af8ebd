#include "pesym/symexpr/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <vector>

namespace pesym::symexpr {

namespace {

std::optional<Builtin> lookup_builtin(std::string_view name) {
    if (name == "exp") return Builtin::Exp;
    if (name == "ln") return Builtin::Ln;
    if (name == "sin") return Builtin::Sin;
    if (name == "cos") return Builtin::Cos;
    if (name == "tan") return Builtin::Tan;
    if (name == "sqrt") return Builtin::Sqrt;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse_all() {
        Expr e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but input ended");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+')) terms.push_back(term());
            else if (accept('-')) terms.push_back(raw::neg(term()));
            else break;
        }
        return terms.size() == 1 ? terms.front() : raw::sum(std::move(terms));
    }

    Expr term() {
        Expr acc = factor();
        std::vector<Expr> chain{acc};
        for (;;) {
            if (accept('*')) {
                chain.push_back(factor());
            } else if (accept('/')) {
                Expr lhs = chain.size() == 1 ? chain.front() : raw::product(std::move(chain));
                chain = {raw::quotient(std::move(lhs), factor())};
            } else {
                break;
            }
        }
        return chain.size() == 1 ? chain.front() : raw::product(std::move(chain));
    }

    Expr factor() {
        if (accept('-')) return raw::neg(factor());
        Expr base = atom();
        if (accept('^')) return raw::power(std::move(base), atom());
        return base;
    }

    Expr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail(std::string("unknown token '") + c + "'");
    }

    Expr number() {
        std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail("malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
        }
        std::string text(src_.substr(start, pos_ - start));
        return raw::number(std::strtod(text.c_str(), nullptr));
    }

    Expr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        std::size_t primes_at = pos_;
        int primes = 0;
        while (pos_ < src_.size() && src_[pos_] == '\'') ++pos_, ++primes;
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            ++pos_;
            Expr arg = expr();
            expect(')');
            if (auto fn = lookup_builtin(name)) {
                if (primes > 0) throw ParseError("primes are not allowed on builtin " + name, primes_at);
                return raw::call(*fn, std::move(arg));
            }
            return raw::func(std::move(name), primes, std::move(arg));
        }
        if (primes > 0) throw ParseError("derivative primes require an argument list", primes_at);
        if (lookup_builtin(name)) fail("builtin " + name + " requires an argument");
        return raw::var(std::move(name));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src) { return Parser(src).parse_all(); }

}  // namespace pesym::symexpr
