/**
 * @file scalar.hpp
 * @brief Exact scalar arithmetic: big rationals and small cyclotomic fields.
 *
 * Rat is an arbitrary-precision rational (GMP mpq_class, always canonical:
 * gcd-reduced with positive denominator).  Cyc is an element of Q(xi_N) for
 * N in {1,2,3}, stored on the power basis of the N-th cyclotomic polynomial:
 *   N=1: basis {1}                      (xi = 1)
 *   N=2: basis {1}                      (xi = -1, already rational)
 *   N=3: basis {1, xi} with xi^2 = -1 - xi.
 * Only these orders occur: the fixed-point-free diagram automorphisms used
 * downstream have order at most 3.  Mixed-order arithmetic is permitted only
 * when one operand is rational-valued (order 1 or 2); a genuine basis clash
 * raises internal_error.
 */

#pragma once

#include <gmpxx.h>
#include <array>
#include <string>

#include "common.hpp"

namespace qvalab {

using Rat = mpq_class;

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw config_error("invalid rational literal: " + s);
    r.canonicalize();
    return r;
}

/// Euler phi of the supported cyclotomic orders (basis length).
inline int cyc_basis_len(int N) {
    switch (N) {
        case 1: case 2: return 1;
        case 3: return 2;
        default: throw config_error("unsupported cyclotomic order " + std::to_string(N));
    }
}

class Cyc {
public:
    Cyc() : N_(1) {}
    Cyc(long v) : N_(1) { c_[0] = v; }            // NOLINT(google-explicit-constructor)
    Cyc(const Rat& v) : N_(1) {                   // NOLINT(google-explicit-constructor)
        c_[0] = v;
        c_[0].canonicalize();  // guard against two-argument mpq_class construction
    }
    Cyc(int N, Rat a0, Rat a1) : N_(N), c_{std::move(a0), std::move(a1)} {
        cyc_basis_len(N);
        c_[0].canonicalize();
        c_[1].canonicalize();
        if (N != 3 && c_[1] != 0)
            throw internal_error("Cyc: second basis coefficient requires order 3");
    }

    int order() const { return N_; }
    const Rat& a0() const { return c_[0]; }
    const Rat& a1() const { return c_[1]; }

    bool is_zero() const { return c_[0] == 0 && c_[1] == 0; }
    /// True if the value lies in Q (regardless of declared order).
    bool is_rational() const { return c_[1] == 0; }
    /// The rational value; caller must ensure is_rational().
    const Rat& rat() const {
        if (c_[1] != 0) throw internal_error("Cyc::rat on irrational value");
        return c_[0];
    }

    friend bool operator==(const Cyc& x, const Cyc& y) {
        return x.c_[0] == y.c_[0] && x.c_[1] == y.c_[1];
    }
    friend bool operator!=(const Cyc& x, const Cyc& y) { return !(x == y); }

    Cyc operator-() const {
        Cyc r = *this;
        r.c_[0] = -r.c_[0];
        r.c_[1] = -r.c_[1];
        return r;
    }

    friend Cyc operator+(const Cyc& x, const Cyc& y) {
        Cyc r;
        r.N_ = merged_order(x, y);
        r.c_[0] = x.c_[0] + y.c_[0];
        r.c_[1] = x.c_[1] + y.c_[1];
        return r;
    }
    friend Cyc operator-(const Cyc& x, const Cyc& y) { return x + (-y); }

    friend Cyc operator*(const Cyc& x, const Cyc& y) {
        Cyc r;
        r.N_ = merged_order(x, y);
        if (r.N_ == 3) {
            // (a0 + a1 xi)(b0 + b1 xi) with xi^2 = -1 - xi.
            Rat cross = x.c_[0] * y.c_[1] + x.c_[1] * y.c_[0];
            Rat sq = x.c_[1] * y.c_[1];
            r.c_[0] = x.c_[0] * y.c_[0] - sq;
            r.c_[1] = cross - sq;
        } else {
            r.c_[0] = x.c_[0] * y.c_[0];
        }
        return r;
    }

    Cyc inverse() const {
        if (is_zero()) throw internal_error("Cyc: division by zero");
        Cyc r;
        r.N_ = N_;
        if (c_[1] == 0) {
            r.c_[0] = 1 / c_[0];
            return r;
        }
        // (a0 + a1 xi)^-1 = ((a0 - a1) - a1 xi) / (a0^2 - a0 a1 + a1^2).
        Rat nrm = c_[0] * c_[0] - c_[0] * c_[1] + c_[1] * c_[1];
        r.c_[0] = (c_[0] - c_[1]) / nrm;
        r.c_[1] = -c_[1] / nrm;
        return r;
    }

    friend Cyc operator/(const Cyc& x, const Cyc& y) { return x * y.inverse(); }

    Cyc& operator+=(const Cyc& y) { return *this = *this + y; }
    Cyc& operator-=(const Cyc& y) { return *this = *this - y; }
    Cyc& operator*=(const Cyc& y) { return *this = *this * y; }
    Cyc& operator/=(const Cyc& y) { return *this = *this / y; }

    /// Field conjugation xi -> xi^{-1} (identity on rational values).
    Cyc conj() const {
        if (N_ != 3 || c_[1] == 0) return *this;
        // xi^{-1} = xi^2 = -1 - xi, so a0 + a1 xi -> (a0 - a1) - a1 xi.
        return Cyc(3, c_[0] - c_[1], -c_[1]);
    }

    Cyc pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        Cyc acc(1), base = *this;
        acc.N_ = N_;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    std::string to_string() const {
        if (c_[1] == 0) return rat_to_string(c_[0]);
        return rat_to_string(c_[0]) + "+(" + rat_to_string(c_[1]) + ")*xi";
    }

private:
    static int merged_order(const Cyc& x, const Cyc& y) {
        if (x.N_ == y.N_) return x.N_;
        // Values of order 1 or 2 are rational and embed into any basis.
        if (x.is_rational() && x.N_ <= 2) return y.N_;
        if (y.is_rational() && y.N_ <= 2) return x.N_;
        throw internal_error("Cyc: mixing incompatible cyclotomic orders " +
                             std::to_string(x.N_) + " and " + std::to_string(y.N_));
    }

    int N_;
    std::array<Rat, 2> c_{Rat(0), Rat(0)};
};

/// The standard primitive N-th root of unity in the supported field.
inline Cyc primitive_root(int N) {
    switch (N) {
        case 1: return Cyc(1);
        case 2: return Cyc(2, Rat(-1), Rat(0));
        case 3: return Cyc(3, Rat(0), Rat(1));
        default: throw config_error("unsupported cyclotomic order " + std::to_string(N));
    }
}

/// xi_N^k with k reduced mod N.
inline Cyc xi_pow(int N, long k) {
    k %= N;
    if (k < 0) k += N;
    return primitive_root(N).pow(k);
}

inline Cyc cyc_mul(const Cyc& x, const Cyc& y) { return x * y; }
inline Cyc cyc_inverse(const Cyc& x) { return x.inverse(); }

} // namespace qvalab
