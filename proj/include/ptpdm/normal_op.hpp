#pragma once

#include "ptpdm/expr.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ptpdm {

struct OperatorDegreeError : DomainError {
    using DomainError::DomainError;
};

inline constexpr int kMaxOperatorDegree = 16;

inline Scalar binomial(int n, int k) {
    if (k < 0 || k > n) return Scalar();
    std::int64_t acc = 1;
    for (int j = 1; j <= k; ++j) {
        acc = acc * (n - k + j);
        acc /= j;
    }
    return Scalar(acc);
}

// Differential operator in normal-ordered form: sum_k c_k(x) d^k/dx^k with
// the position-dependent coefficients to the left of the derivatives.
class NormalOp {
public:
    NormalOp() = default;

    static NormalOp zero() { return NormalOp(); }

    static NormalOp from_coeffs(std::vector<Expr> coeffs) {
        NormalOp op;
        op.coeffs_.reserve(coeffs.size());
        for (Expr& c : coeffs) op.coeffs_.push_back(simplify(c));
        op.trim();
        op.check_degree();
        return op;
    }

    static NormalOp multiplication(const Expr& f) { return from_coeffs({f}); }
    static NormalOp identity() { return multiplication(constant(std::int64_t(1))); }
    static NormalOp position() { return multiplication(var()); }

    static NormalOp derivative(int k) {
        if (k < 0) throw DomainError("negative derivative order");
        std::vector<Expr> c(k + 1, constant(Scalar()));
        c[k] = constant(std::int64_t(1));
        return from_coeffs(std::move(c));
    }

    // p = -i d/dx; p^k carries the phase (-i)^k in normal form.
    static NormalOp momentum_power(int k) {
        if (k < 0) throw DomainError("negative momentum power");
        std::vector<Expr> c(k + 1, constant(Scalar()));
        std::complex<double> phase(1.0, 0.0);
        for (int j = 0; j < k; ++j) phase *= std::complex<double>(0.0, -1.0);
        c[k] = constant(Scalar(phase));
        return from_coeffs(std::move(c));
    }

    static NormalOp momentum() { return momentum_power(1); }

    int degree() const { return (int)coeffs_.size() - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Expr>& coeffs() const { return coeffs_; }

    Expr coeff(int k) const {
        if (k < 0 || k >= (int)coeffs_.size()) return constant(Scalar());
        return coeffs_[k];
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    void check_degree() const {
        if (degree() > kMaxOperatorDegree)
            throw OperatorDegreeError("operator degree " + std::to_string(degree()) +
                                      " exceeds the supported maximum " +
                                      std::to_string(kMaxOperatorDegree));
    }

    std::vector<Expr> coeffs_;
};

inline NormalOp operator+(const NormalOp& a, const NormalOp& b) {
    std::vector<Expr> c(std::max(a.coeffs().size(), b.coeffs().size()), constant(Scalar()));
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = a.coeff((int)k) + b.coeff((int)k);
    return NormalOp::from_coeffs(std::move(c));
}

inline NormalOp operator-(const NormalOp& a) {
    std::vector<Expr> c;
    c.reserve(a.coeffs().size());
    for (const Expr& e : a.coeffs()) c.push_back(neg(e));
    return NormalOp::from_coeffs(std::move(c));
}

inline NormalOp operator-(const NormalOp& a, const NormalOp& b) { return a + (-b); }

inline NormalOp scale(const Expr& f, const NormalOp& a) {
    std::vector<Expr> c;
    c.reserve(a.coeffs().size());
    for (const Expr& e : a.coeffs()) c.push_back(f * e);
    return NormalOp::from_coeffs(std::move(c));
}

inline NormalOp scale(const Scalar& s, const NormalOp& a) { return scale(constant(s), a); }

// d^k composed with multiplication by f, re-expanded in normal order:
// d^k f = sum_{l=0}^{k} binom(k,l) f^{(k-l)} d^l.
inline NormalOp leibniz_move(int k, const Expr& f) {
    if (k < 0) throw DomainError("negative derivative order");
    std::vector<Expr> c(k + 1, constant(Scalar()));
    for (int l = 0; l <= k; ++l)
        c[l] = constant(binomial(k, l)) * differentiate(f, k - l);
    return NormalOp::from_coeffs(std::move(c));
}

// Operator composition via the generalized Leibniz rule.
inline NormalOp operator*(const NormalOp& a, const NormalOp& b) {
    if (a.is_zero() || b.is_zero()) return NormalOp::zero();
    int deg = a.degree() + b.degree();
    if (deg > kMaxOperatorDegree)
        throw OperatorDegreeError("product degree " + std::to_string(deg) +
                                  " exceeds the supported maximum " +
                                  std::to_string(kMaxOperatorDegree));
    std::vector<Expr> c(deg + 1, constant(Scalar()));
    for (int l = 0; l <= a.degree(); ++l) {
        const Expr& al = a.coeff(l);
        if (al.is_zero()) continue;
        for (int m = 0; m <= b.degree(); ++m) {
            const Expr& bm = b.coeff(m);
            if (bm.is_zero()) continue;
            for (int r = 0; r <= l; ++r) {
                Expr term = constant(binomial(l, r)) * al * differentiate(bm, l - r);
                c[r + m] = c[r + m] + term;
            }
        }
    }
    return NormalOp::from_coeffs(std::move(c));
}

inline NormalOp commutator(const NormalOp& a, const NormalOp& b) { return a * b - b * a; }
inline NormalOp anticommutator(const NormalOp& a, const NormalOp& b) { return a * b + b * a; }

// Formal adjoint on the real line: (f d^k)^dag = (-1)^k d^k conj(f),
// re-expanded in normal order.
inline NormalOp adjoint(const NormalOp& a) {
    if (a.is_zero()) return a;
    std::vector<Expr> c(a.degree() + 1, constant(Scalar()));
    for (int k = 0; k <= a.degree(); ++k) {
        Expr fk = conjugate(a.coeff(k));
        if (fk.is_zero()) continue;
        Scalar sign = Scalar(std::int64_t(k % 2 ? -1 : 1));
        for (int l = 0; l <= k; ++l) {
            Expr term = constant(sign * binomial(k, l)) * differentiate(fk, k - l);
            c[l] = c[l] + term;
        }
    }
    return NormalOp::from_coeffs(std::move(c));
}

// Antiunitary time-reversal conjugation: coefficients conjugated, d intact.
inline NormalOp time_reverse(const NormalOp& a) {
    std::vector<Expr> c;
    c.reserve(a.coeffs().size());
    for (const Expr& e : a.coeffs()) c.push_back(conjugate(e));
    return NormalOp::from_coeffs(std::move(c));
}

// Parity conjugation (x,p) -> (-x,-p): coefficients reflected, d^k picks (-1)^k.
inline NormalOp parity_conjugate(const NormalOp& a) {
    std::vector<Expr> c;
    c.reserve(a.coeffs().size());
    Expr mx = neg(var());
    for (int k = 0; k <= a.degree(); ++k) {
        Expr r = substitute_var(a.coeff(k), mx);
        if (k % 2) r = neg(r);
        c.push_back(r);
    }
    return NormalOp::from_coeffs(std::move(c));
}

// Combined PT action: x -> -x together with i -> -i.
inline NormalOp pt_transform(const NormalOp& a) { return parity_conjugate(time_reverse(a)); }

inline Expr apply(const NormalOp& a, const Expr& f) {
    Expr acc = constant(Scalar());
    for (int k = 0; k <= a.degree(); ++k) {
        if (a.coeff(k).is_zero()) continue;
        acc = acc + a.coeff(k) * differentiate(f, k);
    }
    return simplify(acc);
}

// ---------------------------------------------------------------------------
// Generator expansion: normal-ordered form of sum_k {R_k(x), p^(2k+1)}
// ---------------------------------------------------------------------------

struct GeneratorCoeffs {
    std::vector<Expr> R; // R[k] pairs with p^(2k+1)
};

inline NormalOp expand_generator(const GeneratorCoeffs& g) {
    int top = 0;
    for (std::size_t l = 0; l < g.R.size(); ++l)
        if (!simplify(g.R[l]).is_zero()) top = (int)(2 * l + 1);
    if (top > kMaxOperatorDegree)
        throw OperatorDegreeError("generator degree " + std::to_string(top) +
                                  " exceeds the supported maximum " +
                                  std::to_string(kMaxOperatorDegree));
    std::vector<Expr> S((std::size_t)top + 1, constant(Scalar()));
    for (std::size_t l = 0; l < g.R.size(); ++l) {
        Expr R = simplify(g.R[l]);
        if (R.is_zero()) continue;
        int n = (int)(2 * l + 1);
        Scalar sgn(std::int64_t(l % 2 ? -1 : 1));
        S[n] = S[n] + constant(sgn * Scalar(std::int64_t(2))) * R;
        for (int j = 0; j < n; ++j)
            S[j] = S[j] + constant(sgn * binomial(n, j)) * differentiate(R, n - j);
    }
    std::vector<Expr> c;
    c.reserve(S.size());
    Expr minus_i = constant(std::complex<double>(0.0, -1.0));
    for (Expr& s : S) c.push_back(minus_i * s);
    return NormalOp::from_coeffs(std::move(c));
}

// Reference route for the same object: assemble the anticommutators from
// explicit operator products.
inline NormalOp generator_by_products(const GeneratorCoeffs& g) {
    NormalOp acc;
    for (std::size_t l = 0; l < g.R.size(); ++l) {
        NormalOp R = NormalOp::multiplication(g.R[l]);
        NormalOp pk = NormalOp::momentum_power((int)(2 * l + 1));
        acc = acc + anticommutator(R, pk);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Pointwise operator comparison
// ---------------------------------------------------------------------------

struct OpCompareResult {
    double max_rel_err = 0.0;
    int worst_k = -1;
    bool close = false;
};

inline OpCompareResult op_compare(const NormalOp& a, const NormalOp& b,
                                  const CompareOptions& opt = {}) {
    OpCompareResult r;
    int deg = std::max(a.degree(), b.degree());
    r.close = true;
    for (int k = 0; k <= deg; ++k) {
        CompareResult c = expr_compare(a.coeff(k), b.coeff(k), opt);
        if (c.max_rel_err > r.max_rel_err) {
            r.max_rel_err = c.max_rel_err;
            r.worst_k = k;
        }
        r.close = r.close && c.close;
    }
    if (deg < 0) r.close = true;
    return r;
}

inline bool op_close(const NormalOp& a, const NormalOp& b, const CompareOptions& opt = {}) {
    return op_compare(a, b, opt).close;
}

// ---------------------------------------------------------------------------
// Momentum-polynomial views (x-ordered symbols): A = sum_k C_k(x) p^k with
// every position factor standing left of the momenta. C_k = i^k c_k.
// ---------------------------------------------------------------------------

inline std::vector<Expr> momentum_coefficients(const NormalOp& a) {
    std::vector<Expr> out;
    out.reserve(a.coeffs().size());
    std::complex<double> phase(1.0, 0.0);
    for (int k = 0; k <= a.degree(); ++k) {
        out.push_back(simplify(constant(Scalar(phase)) * a.coeff(k)));
        phase *= std::complex<double>(0.0, 1.0);
    }
    return out;
}

inline NormalOp from_momentum_coefficients(const std::vector<Expr>& C) {
    std::vector<Expr> c;
    c.reserve(C.size());
    std::complex<double> phase(1.0, 0.0);
    for (const Expr& e : C) {
        c.push_back(constant(Scalar(phase)) * e);
        phase *= std::complex<double>(0.0, -1.0);
    }
    return NormalOp::from_coeffs(std::move(c));
}

// Classical symbol: substitute the scalar value p for the momentum operator.
inline std::complex<double> evaluate_symbol(const NormalOp& a, double x,
                                            std::complex<double> p,
                                            const EvalOptions& opt = {}) {
    std::complex<double> acc = 0.0, pk = 1.0;
    const std::complex<double> i(0.0, 1.0);
    for (int k = 0; k <= a.degree(); ++k) {
        // C_k = i^k c_k accompanies p^k in the x-ordered symbol
        acc += evaluate(a.coeff(k), x, opt) * pk;
        pk *= i * p;
    }
    return acc;
}

} // namespace ptpdm
