#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ptpdm {

// Numeric payload of a constant node. Values born from rational literals stay
// exact rationals as long as the arithmetic closes over them (add, multiply,
// negate, integer powers, division); anything else demotes to a complex double.
class Scalar {
public:
    Scalar() : exact_(true), num_(0), den_(1), val_(0.0) {}

    Scalar(std::int64_t n) : exact_(true), num_(n), den_(1), val_(double(n)) {}
    Scalar(int n) : Scalar(std::int64_t(n)) {}
    Scalar(long long n) : Scalar(std::int64_t(n)) {}

    Scalar(std::int64_t n, std::int64_t d) : exact_(true), num_(n), den_(d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        normalize();
        val_ = double(num_) / double(den_);
    }

    explicit Scalar(double v) : exact_(false), num_(0), den_(1), val_(v) {}
    explicit Scalar(std::complex<double> v) : exact_(false), num_(0), den_(1), val_(v) {}

    static Scalar imaginary_unit() { return Scalar(std::complex<double>(0.0, 1.0)); }

    bool exact() const { return exact_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    std::complex<double> value() const { return val_; }

    bool is_zero() const { return exact_ ? num_ == 0 : val_ == 0.0; }
    bool is_one() const { return exact_ ? (num_ == 1 && den_ == 1) : val_ == 1.0; }
    bool is_minus_one() const { return exact_ ? (num_ == -1 && den_ == 1) : val_ == -1.0; }
    bool is_real() const { return exact_ || val_.imag() == 0.0; }

    friend Scalar operator-(const Scalar& a) {
        if (a.exact_ && a.num_ != std::numeric_limits<std::int64_t>::min())
            return Scalar(-a.num_, a.den_);
        return Scalar(-a.val_);
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) {
            __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
            __int128 d = (__int128)a.den_ * b.den_;
            Scalar r;
            if (make_exact(n, d, r)) return r;
        }
        return Scalar(a.val_ + b.val_);
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.exact_ && b.exact_) {
            __int128 n = (__int128)a.num_ * b.num_;
            __int128 d = (__int128)a.den_ * b.den_;
            Scalar r;
            if (make_exact(n, d, r)) return r;
        }
        return Scalar(a.val_ * b.val_);
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) {
        if (b.is_zero()) throw std::domain_error("scalar division by zero");
        if (a.exact_ && b.exact_) {
            __int128 n = (__int128)a.num_ * b.den_;
            __int128 d = (__int128)a.den_ * b.num_;
            Scalar r;
            if (make_exact(n, d, r)) return r;
        }
        return Scalar(a.val_ / b.val_);
    }

    Scalar pow(long long e) const {
        if (e == 0) return Scalar(std::int64_t(1));
        Scalar base = *this;
        if (e < 0) {
            base = Scalar(std::int64_t(1)) / base;
            e = -e;
        }
        Scalar acc(std::int64_t(1));
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    Scalar conj() const {
        if (exact_) return *this;
        return Scalar(std::conj(val_));
    }

private:
    void normalize() {
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    static bool make_exact(__int128 n, __int128 d, Scalar& out) {
        if (d == 0) return false;
        if (d < 0) { n = -n; d = -d; }
        __int128 an = n < 0 ? -n : n;
        __int128 g = gcd128(an, d);
        if (g > 1) { n /= g; d /= g; }
        const __int128 lim = std::numeric_limits<std::int64_t>::max();
        if (n > lim || n < -lim || d > lim) return false;
        out.exact_ = true;
        out.num_ = (std::int64_t)n;
        out.den_ = (std::int64_t)d;
        out.val_ = double(out.num_) / double(out.den_);
        return true;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a < 0 ? -a : a;
    }

    bool exact_;
    std::int64_t num_, den_;
    std::complex<double> val_;
};

} // namespace ptpdm
