#pragma once

#include "ptpdm/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptpdm {

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Kind { Constant, Var, Neg, Add, Mul, Pow, Sin, Cos, Tan, Sec, Exp };

enum class Parity { Even, Odd, Indeterminate };

struct Interval {
    double lo = -1.0, hi = 1.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

class Expr;
using ExprList = std::vector<Expr>;

struct Node {
    Kind kind;
    Scalar value;       // Constant
    long long exponent; // Pow
    ExprList kids;
};

class Expr {
public:
    Expr() : node_(zero_node()) {}
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    Kind kind() const { return node_->kind; }
    const Scalar& value() const { return node_->value; }
    long long exponent() const { return node_->exponent; }
    const ExprList& kids() const { return node_->kids; }
    const Expr& kid(std::size_t i) const { return node_->kids[i]; }
    std::size_t arity() const { return node_->kids.size(); }

    bool is_constant() const { return node_->kind == Kind::Constant; }
    bool is_zero() const { return is_constant() && node_->value.is_zero(); }
    bool is_one() const { return is_constant() && node_->value.is_one(); }

private:
    static std::shared_ptr<const Node> zero_node() {
        static const auto z = std::make_shared<const Node>(Node{Kind::Constant, Scalar(), 0, {}});
        return z;
    }
    std::shared_ptr<const Node> node_;
};

inline Expr make_node(Kind k, ExprList kids, Scalar v = Scalar(), long long e = 0) {
    return Expr(std::make_shared<const Node>(Node{k, v, e, std::move(kids)}));
}

inline Expr constant(Scalar v) { return make_node(Kind::Constant, {}, v); }
inline Expr constant(std::int64_t n) { return constant(Scalar(n)); }
inline Expr rational(std::int64_t n, std::int64_t d) { return constant(Scalar(n, d)); }
inline Expr constant(double v) { return constant(Scalar(v)); }
inline Expr constant(std::complex<double> v) { return constant(Scalar(v)); }
inline Expr var() { return make_node(Kind::Var, {}); }
inline Expr neg(Expr e) { return make_node(Kind::Neg, {std::move(e)}); }
inline Expr add(ExprList kids) { return make_node(Kind::Add, std::move(kids)); }
inline Expr mul(ExprList kids) { return make_node(Kind::Mul, std::move(kids)); }
inline Expr pow(Expr base, long long e) { return make_node(Kind::Pow, {std::move(base)}, Scalar(), e); }
inline Expr sin(Expr e) { return make_node(Kind::Sin, {std::move(e)}); }
inline Expr cos(Expr e) { return make_node(Kind::Cos, {std::move(e)}); }
inline Expr tan(Expr e) { return make_node(Kind::Tan, {std::move(e)}); }
inline Expr sec(Expr e) { return make_node(Kind::Sec, {std::move(e)}); }
inline Expr exp(Expr e) { return make_node(Kind::Exp, {std::move(e)}); }

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }

// ---------------------------------------------------------------------------
// Canonical printer. Emits the same grammar the parser accepts, so
// parse(render(e)) reproduces e pointwise. Complex constants use the
// imaginary-unit token `i`.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Printer precedence tiers: sum < unary minus < product < power < atom.
enum { PREC_SUM = 0, PREC_UNARY = 1, PREC_PROD = 2, PREC_POW = 3, PREC_ATOM = 4 };

inline std::string render_impl(const Expr& e, int ctx);

inline std::string wrap(const std::string& s, bool need) {
    return need ? "(" + s + ")" : s;
}

inline std::string render_scalar(const Scalar& s, int ctx) {
    if (s.exact()) {
        std::string body = std::to_string(s.num());
        if (s.den() != 1) body += "/" + std::to_string(s.den());
        return wrap(body, s.num() < 0 && ctx > PREC_SUM);
    }
    std::complex<double> v = s.value();
    if (v.imag() == 0.0)
        return wrap(format_double(v.real()), v.real() < 0 && ctx > PREC_SUM);
    std::string body = format_double(v.real());
    body += v.imag() < 0 ? " - " : " + ";
    body += format_double(std::abs(v.imag())) + "*i";
    return "(" + body + ")";
}

inline std::string render_impl(const Expr& e, int ctx) {
    switch (e.kind()) {
    case Kind::Constant:
        return render_scalar(e.value(), ctx);
    case Kind::Var:
        return "x";
    case Kind::Neg:
        return wrap("-" + render_impl(e.kid(0), PREC_PROD), ctx > PREC_UNARY);
    case Kind::Add: {
        if (e.arity() == 0) return "0";
        std::string s = render_impl(e.kid(0), PREC_SUM);
        for (std::size_t i = 1; i < e.arity(); ++i) {
            const Expr& k = e.kid(i);
            if (k.kind() == Kind::Neg)
                s += " - " + render_impl(k.kid(0), PREC_PROD);
            else
                s += " + " + render_impl(k, PREC_UNARY);
        }
        return wrap(s, ctx > PREC_SUM);
    }
    case Kind::Mul: {
        if (e.arity() == 0) return "1";
        std::string s;
        for (std::size_t i = 0; i < e.arity(); ++i) {
            if (i) s += "*";
            s += render_impl(e.kid(i), PREC_PROD + 1);
        }
        return wrap(s, ctx > PREC_PROD);
    }
    case Kind::Pow:
        return wrap(render_impl(e.kid(0), PREC_ATOM) + "^" + std::to_string(e.exponent()),
                    ctx > PREC_POW);
    case Kind::Sin: return "sin(" + render_impl(e.kid(0), PREC_SUM) + ")";
    case Kind::Cos: return "cos(" + render_impl(e.kid(0), PREC_SUM) + ")";
    case Kind::Tan: return "tan(" + render_impl(e.kid(0), PREC_SUM) + ")";
    case Kind::Sec: return "sec(" + render_impl(e.kid(0), PREC_SUM) + ")";
    case Kind::Exp: return "exp(" + render_impl(e.kid(0), PREC_SUM) + ")";
    }
    return "?";
}

} // namespace detail

inline std::string render(const Expr& e) { return detail::render_impl(e, detail::PREC_SUM); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalOptions {
    double pole_floor = 1e-12;
};

inline std::complex<double> evaluate(const Expr& e, std::complex<double> x0,
                                     const EvalOptions& opt = {}) {
    using C = std::complex<double>;
    switch (e.kind()) {
    case Kind::Constant: return e.value().value();
    case Kind::Var: return x0;
    case Kind::Neg: return -evaluate(e.kid(0), x0, opt);
    case Kind::Add: {
        C s = 0.0;
        for (const Expr& k : e.kids()) s += evaluate(k, x0, opt);
        return s;
    }
    case Kind::Mul: {
        C p = 1.0;
        for (const Expr& k : e.kids()) p *= evaluate(k, x0, opt);
        return p;
    }
    case Kind::Pow: {
        C b = evaluate(e.kid(0), x0, opt);
        long long n = e.exponent();
        if (n < 0 && std::abs(b) <= opt.pole_floor)
            throw PoleError("negative power of vanishing base: " + render(e));
        C acc = 1.0, base = b;
        long long k = n < 0 ? -n : n;
        while (k > 0) {
            if (k & 1) acc *= base;
            base *= base;
            k >>= 1;
        }
        return n < 0 ? 1.0 / acc : acc;
    }
    case Kind::Sin: return std::sin(evaluate(e.kid(0), x0, opt));
    case Kind::Cos: return std::cos(evaluate(e.kid(0), x0, opt));
    case Kind::Tan: {
        C u = evaluate(e.kid(0), x0, opt);
        C c = std::cos(u);
        if (std::abs(c) <= opt.pole_floor)
            throw PoleError("tan evaluated too close to a pole: " + render(e));
        return std::sin(u) / c;
    }
    case Kind::Sec: {
        C u = evaluate(e.kid(0), x0, opt);
        C c = std::cos(u);
        if (std::abs(c) <= opt.pole_floor)
            throw PoleError("sec evaluated too close to a pole: " + render(e));
        return 1.0 / c;
    }
    case Kind::Exp: return std::exp(evaluate(e.kid(0), x0, opt));
    }
    throw DomainError("unknown node kind");
}

// ---------------------------------------------------------------------------
// Simplification: constant folding, zero/one elimination, flattened sums and
// products, power composition. Runs bottom-up passes to a fixed point, so the
// result is idempotent.
// ---------------------------------------------------------------------------

namespace detail {

// Pulls signs and constant factors out of a (already simplified) term so sums
// can merge terms that differ only by a numeric coefficient.
struct SplitTerm {
    Scalar coeff;
    Expr core;        // constant-free; meaningless when pure_constant
    bool pure_constant;
};

inline SplitTerm split_coefficient(const Expr& e) {
    Scalar c(std::int64_t(1));
    Expr cur = e;
    while (cur.kind() == Kind::Neg) {
        c = -c;
        cur = cur.kid(0);
    }
    if (cur.is_constant()) return {c * cur.value(), Expr(), true};
    if (cur.kind() != Kind::Mul) return {c, cur, false};
    ExprList rest;
    for (const Expr& raw : cur.kids()) {
        Expr k = raw;
        while (k.kind() == Kind::Neg) {
            c = -c;
            k = k.kid(0);
        }
        if (k.is_constant()) c = c * k.value();
        else rest.push_back(k);
    }
    if (rest.empty()) return {c, Expr(), true};
    if (rest.size() == 1) return {c, rest[0], false};
    return {c, mul(std::move(rest)), false};
}

inline Expr simplify_pass(const Expr& e) {
    switch (e.kind()) {
    case Kind::Constant:
    case Kind::Var:
        return e;
    case Kind::Neg: {
        Expr k = simplify_pass(e.kid(0));
        if (k.is_constant()) return constant(-k.value());
        if (k.kind() == Kind::Neg) return k.kid(0);
        return neg(k);
    }
    case Kind::Add: {
        ExprList flat;
        Scalar c;
        for (const Expr& raw : e.kids()) {
            Expr k = simplify_pass(raw);
            if (k.kind() == Kind::Add) {
                for (const Expr& kk : k.kids()) {
                    if (kk.is_constant()) c = c + kk.value();
                    else flat.push_back(kk);
                }
            } else if (k.is_constant()) {
                c = c + k.value();
            } else {
                flat.push_back(k);
            }
        }
        // merge like terms, keyed by the printed form of the constant-free
        // core; map order doubles as a canonical term order so syntactically
        // shuffled inputs land on the same tree
        std::map<std::string, std::pair<Scalar, Expr>> groups;
        for (const Expr& t : flat) {
            SplitTerm tm = split_coefficient(t);
            if (tm.pure_constant) {
                c = c + tm.coeff;
                continue;
            }
            std::string key = render_impl(tm.core, PREC_SUM);
            auto it = groups.find(key);
            if (it == groups.end())
                groups.emplace(std::move(key), std::make_pair(tm.coeff, tm.core));
            else
                it->second.first = it->second.first + tm.coeff;
        }
        ExprList out;
        if (!c.is_zero()) out.push_back(constant(c));
        for (auto& [key, group] : groups) {
            auto& [coeff, core] = group;
            if (coeff.is_zero()) continue;
            if (coeff.is_one()) {
                out.push_back(core);
            } else if (coeff.is_minus_one()) {
                out.push_back(neg(core));
            } else if (core.kind() == Kind::Mul) {
                ExprList ks{constant(coeff)};
                ks.insert(ks.end(), core.kids().begin(), core.kids().end());
                out.push_back(mul(std::move(ks)));
            } else {
                out.push_back(mul({constant(coeff), core}));
            }
        }
        if (out.empty()) return constant(Scalar());
        if (out.size() == 1) return out[0];
        return add(std::move(out));
    }
    case Kind::Mul: {
        ExprList flat;
        Scalar c(std::int64_t(1));
        auto absorb = [&](auto&& self, const Expr& k) -> void {
            if (k.kind() == Kind::Neg) {
                c = -c;
                self(self, k.kid(0));
            } else if (k.kind() == Kind::Mul) {
                for (const Expr& kk : k.kids()) self(self, kk);
            } else if (k.is_constant()) {
                c = c * k.value();
            } else {
                flat.push_back(k);
            }
        };
        for (const Expr& raw : e.kids()) absorb(absorb, simplify_pass(raw));
        if (c.is_zero()) return constant(Scalar());
        // merge powers of identical bases, in canonical (printed) base order
        std::map<std::string, std::pair<Expr, long long>> bases;
        for (const Expr& f : flat) {
            Expr base = f;
            long long ex = 1;
            if (f.kind() == Kind::Pow) {
                base = f.kid(0);
                ex = f.exponent();
            }
            std::string key = render_impl(base, PREC_SUM);
            auto it = bases.find(key);
            if (it == bases.end())
                bases.emplace(std::move(key), std::make_pair(base, ex));
            else
                it->second.second += ex;
        }
        ExprList out;
        if (!c.is_one()) out.push_back(constant(c));
        for (auto& [key, group] : bases) {
            auto& [base, ex] = group;
            if (ex == 0) continue;
            out.push_back(ex == 1 ? base : pow(base, ex));
        }
        if (out.empty()) return constant(Scalar(std::int64_t(1)));
        if (out.size() == 1) return out[0];
        return mul(std::move(out));
    }
    case Kind::Pow: {
        Expr k = simplify_pass(e.kid(0));
        long long n = e.exponent();
        if (n == 0) return constant(Scalar(std::int64_t(1)));
        if (n == 1) return k;
        if (k.is_constant() && !(k.value().is_zero() && n < 0))
            return constant(k.value().pow(n));
        if (k.kind() == Kind::Pow) return pow(k.kid(0), k.exponent() * n);
        return pow(k, n);
    }
    default: {
        Expr k = simplify_pass(e.kid(0));
        if (k.is_constant()) {
            const Scalar& s = k.value();
            if (s.is_zero()) {
                switch (e.kind()) {
                case Kind::Sin: case Kind::Tan: return constant(Scalar());
                case Kind::Cos: case Kind::Sec: case Kind::Exp:
                    return constant(Scalar(std::int64_t(1)));
                default: break;
                }
            }
            std::complex<double> u = s.value();
            switch (e.kind()) {
            case Kind::Sin: return constant(Scalar(std::sin(u)));
            case Kind::Cos: return constant(Scalar(std::cos(u)));
            case Kind::Tan: return constant(Scalar(std::sin(u) / std::cos(u)));
            case Kind::Sec: return constant(Scalar(1.0 / std::cos(u)));
            case Kind::Exp: return constant(Scalar(std::exp(u)));
            default: break;
            }
        }
        return make_node(e.kind(), {k});
    }
    }
}

} // namespace detail

inline Expr simplify(const Expr& e) {
    Expr cur = detail::simplify_pass(e);
    std::string sig = render(cur);
    for (int i = 0; i < 3; ++i) {
        Expr nxt = detail::simplify_pass(cur);
        std::string nsig = render(nxt);
        if (nsig == sig) break;
        cur = nxt;
        sig = std::move(nsig);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Differentiation (exact, closed over the node set)
// ---------------------------------------------------------------------------

namespace detail {

inline Expr d1(const Expr& e) {
    switch (e.kind()) {
    case Kind::Constant: return constant(Scalar());
    case Kind::Var: return constant(Scalar(std::int64_t(1)));
    case Kind::Neg: return neg(d1(e.kid(0)));
    case Kind::Add: {
        ExprList kids;
        kids.reserve(e.arity());
        for (const Expr& k : e.kids()) kids.push_back(d1(k));
        return add(std::move(kids));
    }
    case Kind::Mul: {
        ExprList terms;
        for (std::size_t i = 0; i < e.arity(); ++i) {
            ExprList factors = e.kids();
            factors[i] = d1(e.kid(i));
            terms.push_back(mul(std::move(factors)));
        }
        return add(std::move(terms));
    }
    case Kind::Pow: {
        long long n = e.exponent();
        if (n == 0) return constant(Scalar());
        return mul({constant(Scalar(n)), pow(e.kid(0), n - 1), d1(e.kid(0))});
    }
    case Kind::Sin: return mul({cos(e.kid(0)), d1(e.kid(0))});
    case Kind::Cos: return neg(mul({sin(e.kid(0)), d1(e.kid(0))}));
    case Kind::Tan: return mul({pow(sec(e.kid(0)), 2), d1(e.kid(0))});
    case Kind::Sec: return mul({sec(e.kid(0)), tan(e.kid(0)), d1(e.kid(0))});
    case Kind::Exp: return mul({exp(e.kid(0)), d1(e.kid(0))});
    }
    throw DomainError("unknown node kind");
}

} // namespace detail

inline Expr differentiate(const Expr& e, int order = 1) {
    if (order < 0) throw DomainError("negative derivative order");
    Expr cur = simplify(e);
    for (int i = 0; i < order; ++i) cur = simplify(detail::d1(cur));
    return cur;
}

// ---------------------------------------------------------------------------
// Variable substitution and coefficient conjugation
// ---------------------------------------------------------------------------

inline Expr substitute_var(const Expr& e, const Expr& repl) {
    switch (e.kind()) {
    case Kind::Constant: return e;
    case Kind::Var: return repl;
    default: {
        ExprList kids;
        kids.reserve(e.arity());
        for (const Expr& k : e.kids()) kids.push_back(substitute_var(k, repl));
        return make_node(e.kind(), std::move(kids), e.value(), e.exponent());
    }
    }
}

// Complex conjugate of the function values on the real axis: every primitive
// maps reals to reals, so conjugation pushes onto the constants.
inline Expr conjugate(const Expr& e) {
    if (e.kind() == Kind::Constant) return constant(e.value().conj());
    ExprList kids;
    kids.reserve(e.arity());
    for (const Expr& k : e.kids()) kids.push_back(conjugate(k));
    return make_node(e.kind(), std::move(kids), e.value(), e.exponent());
}

// ---------------------------------------------------------------------------
// Parity classification: structural rules with a sampling fallback
// ---------------------------------------------------------------------------

struct ParityOptions {
    double half_width = 1.0;
    double tol = 1e-9;
    int samples = 32;
};

namespace detail {

inline Parity parity_structural(const Expr& e) {
    switch (e.kind()) {
    case Kind::Constant: return Parity::Even;
    case Kind::Var: return Parity::Odd;
    case Kind::Neg: return parity_structural(e.kid(0));
    case Kind::Add: {
        bool all_even = true, all_odd = true;
        for (const Expr& k : e.kids()) {
            Parity p = parity_structural(k);
            if (p == Parity::Indeterminate) return Parity::Indeterminate;
            all_even &= (p == Parity::Even) || k.is_zero();
            all_odd &= (p == Parity::Odd) || k.is_zero();
        }
        if (all_even) return Parity::Even;
        if (all_odd) return Parity::Odd;
        return Parity::Indeterminate;
    }
    case Kind::Mul: {
        int sign = 0;
        for (const Expr& k : e.kids()) {
            Parity p = parity_structural(k);
            if (p == Parity::Indeterminate) return Parity::Indeterminate;
            if (p == Parity::Odd) sign ^= 1;
        }
        return sign ? Parity::Odd : Parity::Even;
    }
    case Kind::Pow: {
        Parity p = parity_structural(e.kid(0));
        if (p == Parity::Even) return Parity::Even;
        if (p == Parity::Odd) return (e.exponent() % 2 == 0) ? Parity::Even : Parity::Odd;
        return Parity::Indeterminate;
    }
    case Kind::Sin:
    case Kind::Tan: {
        Parity p = parity_structural(e.kid(0));
        if (p == Parity::Odd) return Parity::Odd;
        if (p == Parity::Even) return Parity::Even;
        return Parity::Indeterminate;
    }
    case Kind::Cos:
    case Kind::Sec: {
        Parity p = parity_structural(e.kid(0));
        if (p != Parity::Indeterminate) return Parity::Even;
        return Parity::Indeterminate;
    }
    case Kind::Exp: {
        Parity p = parity_structural(e.kid(0));
        if (p == Parity::Even) return Parity::Even;
        return Parity::Indeterminate;
    }
    }
    return Parity::Indeterminate;
}

} // namespace detail

inline Parity parity_of(const Expr& e, const ParityOptions& opt = {}) {
    Expr s = simplify(e);
    Parity structural = detail::parity_structural(s);
    if (structural != Parity::Indeterminate) return structural;

    bool even_ok = true, odd_ok = true;
    int valid = 0;
    for (int j = 0; j < opt.samples && (even_ok || odd_ok); ++j) {
        double x = opt.half_width * (j + 0.5) / opt.samples;
        std::complex<double> fp, fm;
        try {
            fp = evaluate(s, x);
            fm = evaluate(s, -x);
        } catch (const PoleError&) {
            continue;
        }
        ++valid;
        double scale = std::max({1.0, std::abs(fp), std::abs(fm)});
        if (std::abs(fp - fm) > opt.tol * scale) even_ok = false;
        if (std::abs(fp + fm) > opt.tol * scale) odd_ok = false;
    }
    if (valid < opt.samples / 2) return Parity::Indeterminate;
    if (even_ok) return Parity::Even;
    if (odd_ok) return Parity::Odd;
    return Parity::Indeterminate;
}

// ---------------------------------------------------------------------------
// Randomized pointwise comparison (the working notion of equality for
// symbolic results)
// ---------------------------------------------------------------------------

struct CompareOptions {
    Interval domain{-1.0, 1.0};
    int points = 100;
    double tol = 1e-10;
    std::uint64_t seed = 20260815;
};

struct CompareResult {
    double max_rel_err = 0.0;
    int valid_points = 0;
    bool close = false;
};

inline CompareResult expr_compare(const Expr& a, const Expr& b, const CompareOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> dist(opt.domain.lo, opt.domain.hi);
    CompareResult r;
    for (int j = 0; j < opt.points; ++j) {
        double x = dist(rng);
        std::complex<double> va, vb;
        try {
            va = evaluate(a, x);
            vb = evaluate(b, x);
        } catch (const PoleError&) {
            continue;
        }
        ++r.valid_points;
        double scale = std::max({1.0, std::abs(va), std::abs(vb)});
        r.max_rel_err = std::max(r.max_rel_err, std::abs(va - vb) / scale);
    }
    r.close = r.valid_points >= opt.points / 2 && r.max_rel_err <= opt.tol;
    return r;
}

inline bool expr_close(const Expr& a, const Expr& b, const CompareOptions& opt = {}) {
    return expr_compare(a, b, opt).close;
}

} // namespace ptpdm
