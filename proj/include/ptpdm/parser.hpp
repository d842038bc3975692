#pragma once

#include "ptpdm/expr.hpp"

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace ptpdm {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

using ParamMap = std::map<std::string, Scalar>;

// Recursive-descent parser for the expression grammar:
//   expression := addend (('+'|'-') addend)*
//   addend     := ['-'] product
//   product    := factor (('*'|'/') factor)*
//   factor     := primary ['^' exponent]
//   exponent   := ['-'] integer ['^' exponent]        (right-associative)
//   primary    := number | 'x' | fn '(' expression ')' | name | '(' expression ')'
// Functions: sin cos tan sec exp. Named parameters are substituted at parse
// time from the map; `i` denotes the imaginary unit unless shadowed. Division
// desugars to multiplication by an inverse power (exact reciprocal for
// constant divisors) since the node set carries no quotient kind.
class Parser {
public:
    Parser(std::string_view src, const ParamMap& params)
        : src_(src), params_(params) {}

    Expr run() {
        skip_ws();
        Expr e = expression();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        return simplify(e);
    }

private:
    Expr expression() {
        Expr acc = addend();
        skip_ws();
        while (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
            char op = src_[pos_++];
            Expr rhs = addend();
            acc = op == '+' ? acc + rhs : acc - rhs;
            skip_ws();
        }
        return acc;
    }

    Expr addend() {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '-') {
            ++pos_;
            return neg(product());
        }
        return product();
    }

    Expr product() {
        Expr acc = factor();
        skip_ws();
        while (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/')) {
            char op = src_[pos_++];
            Expr rhs = factor();
            if (op == '*') {
                acc = acc * rhs;
            } else if (rhs.is_constant()) {
                if (rhs.value().is_zero())
                    throw ParseError("division by constant zero", pos_);
                acc = acc * constant(Scalar(std::int64_t(1)) / rhs.value());
            } else {
                acc = acc * pow(rhs, -1);
            }
            skip_ws();
        }
        return acc;
    }

    Expr factor() {
        Expr base = primary();
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '^') {
            ++pos_;
            return pow(base, exponent());
        }
        return base;
    }

    long long exponent() {
        skip_ws();
        bool negative = false;
        if (pos_ < src_.size() && src_[pos_] == '-') {
            negative = true;
            ++pos_;
            skip_ws();
        }
        std::size_t at = pos_;
        if (pos_ >= src_.size() || !std::isdigit((unsigned char)src_[pos_]))
            throw ParseError("non-integer exponent", at);
        long long v = 0;
        while (pos_ < src_.size() && std::isdigit((unsigned char)src_[pos_])) {
            v = v * 10 + (src_[pos_] - '0');
            if (v > 1000000) throw ParseError("exponent too large", at);
            ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
            throw ParseError("non-integer exponent", at);
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '^') {
            ++pos_;
            long long e2 = exponent();
            if (e2 < 0) throw ParseError("negative exponent in power tower", at);
            long long acc = 1;
            for (long long k = 0; k < e2; ++k) {
                acc *= v;
                if (acc > 1000000 || acc < -1000000)
                    throw ParseError("exponent too large", at);
            }
            v = acc;
        }
        return negative ? -v : v;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            expect(')');
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.')
            return number();
        if (std::isalpha((unsigned char)c) || c == '_')
            return name();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr number() {
        std::size_t start = pos_;
        bool saw_dot = false, saw_exp = false;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isdigit((unsigned char)c)) { ++pos_; continue; }
            if (c == '.' && !saw_dot && !saw_exp) { saw_dot = true; ++pos_; continue; }
            if ((c == 'e' || c == 'E') && !saw_exp && pos_ + 1 < src_.size()) {
                char n = src_[pos_ + 1];
                if (std::isdigit((unsigned char)n) || ((n == '+' || n == '-') &&
                        pos_ + 2 < src_.size() && std::isdigit((unsigned char)src_[pos_ + 2]))) {
                    saw_exp = true;
                    pos_ += (n == '+' || n == '-') ? 2 : 1;
                    continue;
                }
            }
            break;
        }
        std::string text(src_.substr(start, pos_ - start));
        if (text.empty() || text == ".")
            throw ParseError("malformed number", start);
        Scalar s;
        if (exact_literal(text, s)) return constant(s);
        try {
            return constant(Scalar(std::stod(text)));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
    }

    // Decimal and scientific literals become exact rationals whenever the
    // mantissa and the power-of-ten scale fit into 64-bit integers.
    static bool exact_literal(const std::string& text, Scalar& out) {
        __int128 mant = 0;
        int frac_digits = 0;
        long long exp10 = 0;
        std::size_t i = 0;
        bool any = false, in_frac = false;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (std::isdigit((unsigned char)c)) {
                mant = mant * 10 + (c - '0');
                if (mant > (__int128)4 * 1000000000000000000LL) return false;
                if (in_frac) ++frac_digits;
                any = true;
            } else if (c == '.') {
                in_frac = true;
            } else if (c == 'e' || c == 'E') {
                ++i;
                bool neg = false;
                if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
                    neg = text[i] == '-';
                    ++i;
                }
                long long e = 0;
                for (; i < text.size(); ++i) {
                    e = e * 10 + (text[i] - '0');
                    if (e > 40) return false;
                }
                exp10 = neg ? -e : e;
                break;
            }
        }
        if (!any) return false;
        long long shift = exp10 - frac_digits;
        __int128 num = mant, den = 1;
        for (long long k = 0; k < (shift > 0 ? shift : -shift); ++k) {
            if (shift > 0) num *= 10; else den *= 10;
            if (num > (__int128)4 * 1000000000000000000LL ||
                den > (__int128)4 * 1000000000000000000LL) return false;
        }
        const __int128 lim = std::numeric_limits<std::int64_t>::max();
        if (num > lim || den > lim) return false;
        out = Scalar((std::int64_t)num, (std::int64_t)den);
        return true;
    }

    Expr name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
            ++pos_;
        std::string id(src_.substr(start, pos_ - start));
        if (id == "x") return var();
        if (id == "sin" || id == "cos" || id == "tan" || id == "sec" || id == "exp") {
            skip_ws();
            expect('(');
            Expr arg = expression();
            expect(')');
            if (id == "sin") return sin(arg);
            if (id == "cos") return cos(arg);
            if (id == "tan") return tan(arg);
            if (id == "sec") return sec(arg);
            return exp(arg);
        }
        auto it = params_.find(id);
        if (it != params_.end()) return constant(it->second);
        if (id == "i") return constant(Scalar::imaginary_unit());
        throw ParseError("unbound parameter '" + id + "'", start);
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= src_.size() || src_[pos_] != c)
            throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
    }

    std::string_view src_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
};

inline Expr parse(std::string_view src, const ParamMap& params = {}) {
    return Parser(src, params).run();
}

} // namespace ptpdm
