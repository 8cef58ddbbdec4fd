/**
 * @file qpoly.hpp
 * @brief Exact polynomial layer: Laurent polynomials in q over Q(xi), Laurent
 *        polynomials in an auxiliary variable u over those, bivariate
 *        polynomials in (x1,x2), and rational expressions.
 *
 * Identities between rational expressions are decided by cross-multiplication,
 * which is exact and avoids polynomial gcd over Q(xi)[q,q^-1].  Expansion maps
 * bridge this layer into the truncated-series layer: iota_12 expands u = x2/x1
 * as a Taylor series in u, iota_21 expands in 1/u, and subst_exp(k) evaluates
 * at u = xi^k e^x with q = e^hbar.
 */

#pragma once

#include <map>
#include <utility>

#include "series.hpp"

namespace qvalab {

// ---- Laurent polynomials in q ------------------------------------------------

class QLaurent {
public:
    std::map<long, Cyc> t;  // q-exponent -> coefficient

    QLaurent() = default;
    explicit QLaurent(const Cyc& c) { if (!c.is_zero()) t[0] = c; }
    static QLaurent qpow(long k, const Cyc& c = Cyc(1)) {
        QLaurent r;
        if (!c.is_zero()) r.t[k] = c;
        return r;
    }

    bool is_zero() const { return t.empty(); }

    void prune() {
        for (auto it = t.begin(); it != t.end();)
            it = it->second.is_zero() ? t.erase(it) : std::next(it);
    }

    friend QLaurent operator+(const QLaurent& a, const QLaurent& b) {
        QLaurent r = a;
        for (const auto& [k, c] : b.t) {
            auto [it, fresh] = r.t.emplace(k, c);
            if (!fresh) it->second += c;
        }
        r.prune();
        return r;
    }
    QLaurent operator-() const {
        QLaurent r = *this;
        for (auto& [k, c] : r.t) c = -c;
        return r;
    }
    friend QLaurent operator-(const QLaurent& a, const QLaurent& b) { return a + (-b); }
    friend QLaurent operator*(const QLaurent& a, const QLaurent& b) {
        QLaurent r;
        for (const auto& [ka, ca] : a.t)
            for (const auto& [kb, cb] : b.t) {
                Cyc p = ca * cb;
                if (p.is_zero()) continue;
                auto [it, fresh] = r.t.emplace(ka + kb, p);
                if (!fresh) it->second += p;
            }
        r.prune();
        return r;
    }
    QLaurent& operator+=(const QLaurent& b) { return *this = *this + b; }
    QLaurent& operator-=(const QLaurent& b) { return *this = *this - b; }
    QLaurent& operator*=(const QLaurent& b) { return *this = *this * b; }
    friend bool operator==(const QLaurent& a, const QLaurent& b) { return (a - b).is_zero(); }
    friend bool operator!=(const QLaurent& a, const QLaurent& b) { return !(a == b); }

    /// True if this is a unit c*q^k of K[q,q^-1].
    bool is_monomial() const { return t.size() == 1; }

    QLaurent monomial_inverse() const {
        if (!is_monomial()) throw internal_error("QLaurent: inverse of non-monomial");
        const auto& [k, c] = *t.begin();
        return qpow(-k, c.inverse());
    }

    /// Evaluate with q = e^hbar into the series layer.
    MSeries to_series(const SCtx& ctx) const {
        MSeries r = MSeries::zero(ctx);
        for (const auto& [k, c] : t)
            r += qpow_series(ctx, Rat(k)).scaled(c);
        return r;
    }

    /// Evaluate at q = 1 (the classical limit).
    Cyc at_q1() const {
        Cyc s(0);
        for (const auto& [k, c] : t) s += c;
        return s;
    }

    std::string to_string() const {
        if (t.empty()) return "0";
        std::string s;
        for (const auto& [k, c] : t) {
            if (!s.empty()) s += " + ";
            s += "(" + c.to_string() + ")q^" + std::to_string(k);
        }
        return s;
    }
};

// ---- Laurent polynomials in u over K[q,q^-1] ---------------------------------

class UPoly {
public:
    std::map<long, QLaurent> t;  // u-exponent -> coefficient

    UPoly() = default;
    explicit UPoly(const QLaurent& c) { if (!c.is_zero()) t[0] = c; }
    static UPoly upow(long n, const QLaurent& c) {
        UPoly r;
        if (!c.is_zero()) r.t[n] = c;
        return r;
    }

    bool is_zero() const { return t.empty(); }
    void prune() {
        for (auto it = t.begin(); it != t.end();)
            it = it->second.is_zero() ? t.erase(it) : std::next(it);
    }

    friend UPoly operator+(const UPoly& a, const UPoly& b) {
        UPoly r = a;
        for (const auto& [k, c] : b.t) {
            auto [it, fresh] = r.t.emplace(k, c);
            if (!fresh) it->second += c;
        }
        r.prune();
        return r;
    }
    UPoly operator-() const {
        UPoly r = *this;
        for (auto& [k, c] : r.t) c = -c;
        return r;
    }
    friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        UPoly r;
        for (const auto& [ka, ca] : a.t)
            for (const auto& [kb, cb] : b.t) {
                QLaurent p = ca * cb;
                if (p.is_zero()) continue;
                auto [it, fresh] = r.t.emplace(ka + kb, p);
                if (!fresh) it->second += p;
            }
        r.prune();
        return r;
    }
    UPoly& operator*=(const UPoly& b) { return *this = *this * b; }
    UPoly& operator+=(const UPoly& b) { return *this = *this + b; }
    friend bool operator==(const UPoly& a, const UPoly& b) { return (a - b).is_zero(); }
    friend bool operator!=(const UPoly& a, const UPoly& b) { return !(a == b); }

    /// Substitute u -> 1/u.
    UPoly flip_u() const {
        UPoly r;
        for (const auto& [k, c] : t) r.t[-k] = c;
        return r;
    }

    long lo_deg() const {
        if (t.empty()) throw internal_error("UPoly: degree of zero");
        return t.begin()->first;
    }
    long hi_deg() const {
        if (t.empty()) throw internal_error("UPoly: degree of zero");
        return t.rbegin()->first;
    }

    const QLaurent& coeff(long n) const {
        static const QLaurent z;
        auto it = t.find(n);
        return it == t.end() ? z : it->second;
    }

    /// Value at u = 0 (requires no negative powers).
    QLaurent at_zero() const {
        if (!t.empty() && lo_deg() < 0)
            throw internal_error("UPoly: evaluation at 0 with negative powers");
        return coeff(0);
    }
};

// ---- rational expressions in u ------------------------------------------------

struct RatExpr {
    UPoly num, den;

    RatExpr() : den(UPoly(QLaurent(Cyc(1)))) {}
    RatExpr(UPoly n, UPoly d) : num(std::move(n)), den(std::move(d)) {
        if (den.is_zero()) throw internal_error("RatExpr: zero denominator");
    }

    static RatExpr one() {
        UPoly u(QLaurent(Cyc(1)));
        return RatExpr(u, u);
    }

    friend RatExpr operator*(const RatExpr& a, const RatExpr& b) {
        return RatExpr(a.num * b.num, a.den * b.den);
    }
    RatExpr reciprocal() const {
        if (num.is_zero()) throw internal_error("RatExpr: reciprocal of zero");
        return RatExpr(den, num);
    }
    /// Substitute u -> 1/u.
    RatExpr flip_u() const { return RatExpr(num.flip_u(), den.flip_u()); }

    /// Exact equality by cross-multiplication.
    friend bool operator==(const RatExpr& a, const RatExpr& b) {
        return a.num * b.den == b.num * a.den;
    }
    friend bool operator!=(const RatExpr& a, const RatExpr& b) { return !(a == b); }

    bool is_one() const { return num == den; }

    /// Value at u = 0; denominator must be a q-monomial at 0.
    QLaurent at_zero_times_inverse_den() const {
        return num.at_zero() * den.at_zero().monomial_inverse();
    }
};

// ---- bivariate polynomials in (x1, x2) ----------------------------------------

class BPoly {
public:
    std::map<std::pair<long, long>, QLaurent> t;

    BPoly() = default;
    explicit BPoly(const QLaurent& c) { if (!c.is_zero()) t[{0, 0}] = c; }
    static BPoly mono(long e1, long e2, const QLaurent& c) {
        BPoly r;
        if (!c.is_zero()) r.t[{e1, e2}] = c;
        return r;
    }

    bool is_zero() const { return t.empty(); }
    void prune() {
        for (auto it = t.begin(); it != t.end();)
            it = it->second.is_zero() ? t.erase(it) : std::next(it);
    }

    friend BPoly operator+(const BPoly& a, const BPoly& b) {
        BPoly r = a;
        for (const auto& [k, c] : b.t) {
            auto [it, fresh] = r.t.emplace(k, c);
            if (!fresh) it->second += c;
        }
        r.prune();
        return r;
    }
    BPoly operator-() const {
        BPoly r = *this;
        for (auto& [k, c] : r.t) c = -c;
        return r;
    }
    friend BPoly operator-(const BPoly& a, const BPoly& b) { return a + (-b); }
    friend BPoly operator*(const BPoly& a, const BPoly& b) {
        BPoly r;
        for (const auto& [ka, ca] : a.t)
            for (const auto& [kb, cb] : b.t) {
                QLaurent p = ca * cb;
                if (p.is_zero()) continue;
                auto [it, fresh] = r.t.emplace(
                    std::make_pair(ka.first + kb.first, ka.second + kb.second), p);
                if (!fresh) it->second += p;
            }
        r.prune();
        return r;
    }
    BPoly& operator*=(const BPoly& b) { return *this = *this * b; }
    BPoly& operator+=(const BPoly& b) { return *this = *this + b; }
    friend bool operator==(const BPoly& a, const BPoly& b) { return (a - b).is_zero(); }
    friend bool operator!=(const BPoly& a, const BPoly& b) { return !(a == b); }

    BPoly scaled(const QLaurent& c) const {
        BPoly r;
        for (const auto& [k, cc] : t) {
            QLaurent p = cc * c;
            if (!p.is_zero()) r.t[k] = p;
        }
        return r;
    }

    /// Swap x1 <-> x2.
    BPoly swap_vars() const {
        BPoly r;
        for (const auto& [k, c] : t) r.t[{k.second, k.first}] = c;
        return r;
    }

    /// Evaluate into the series layer: x1 -> x_{v1}, x2 -> x_{v2}, q = e^hbar.
    MSeries to_series(const SCtx& ctx, int v1 = 0, int v2 = 1) const {
        MSeries r = MSeries::zero(ctx);
        for (const auto& [k, c] : t)
            r += c.to_series(ctx).mono_mul(v1, k.first, Cyc(1)).mono_mul(v2, k.second, Cyc(1));
        return r;
    }
};

/// Homogenize a u-Laurent polynomial with u = x2/x1, multiplying by x1^m:
/// u^n -> x1^{m-n} x2^{n}.
inline BPoly homogenize(const UPoly& p, long m) {
    BPoly r;
    for (const auto& [n, c] : p.t) r.t[{m - n, n}] = c;
    r.prune();
    return r;
}

// ---- expansions into the series layer ------------------------------------------

/// Taylor expansion of num/den in u up to u^T (coefficients in K[q,q^-1]).
/// Requires the trailing coefficient of den to be a q-monomial (a unit).
inline std::map<long, QLaurent> u_taylor(const UPoly& num, const UPoly& den, long T) {
    if (den.is_zero()) throw internal_error("u_taylor: zero denominator");
    long m = den.lo_deg();
    QLaurent lead_inv = den.coeff(m).monomial_inverse();
    // r = num/den = u^{-m} * (num * lead_inv) / (1 + g), g = (den*lead_inv - u^m)/u^m.
    std::map<long, QLaurent> res;
    if (num.is_zero()) return res;
    long nlo = num.lo_deg() - m;
    if (nlo < 0)
        throw internal_error("u_taylor: expansion has a pole at u=0");
    // Recursive division: series s with num*lead_inv = den*lead_inv*s.
    UPoly nn = num * UPoly(lead_inv);
    UPoly dd = den * UPoly(lead_inv);  // trailing term u^m with coefficient 1
    std::map<long, QLaurent> s;       // u-exponent -> coefficient of the quotient
    for (long n = nlo; n <= T; ++n) {
        QLaurent c = nn.coeff(n + m);
        for (const auto& [j, sc] : s) {
            const QLaurent& d = dd.coeff(n + m - j);
            if (!d.is_zero()) c -= sc * d;
        }
        if (!c.is_zero()) s[n] = c;
    }
    return s;
}

/// iota_12: expand r(u) as a Taylor series at u = 0 (u = x2/x1 small).
/// Returned as an MSeries in (x_{v1}, x_{v2}) with sound windows: the u-degree
/// is truncated at T, so coefficients beyond the window are unclaimed.
inline MSeries iota_12(const RatExpr& r, const SCtx& ctx, long T, int v1 = 0, int v2 = 1) {
    MSeries out = MSeries::zero(ctx);
    if (r.num.is_zero()) return out;
    auto s = u_taylor(r.num, r.den, T);
    for (const auto& [n, c] : s)
        out += c.to_series(ctx).mono_mul(v1, -n, Cyc(1)).mono_mul(v2, n, Cyc(1));
    // The true expansion continues beyond u^T: widen the support claim and
    // cap validity at u-degree T on every hbar slice.
    long lo = r.num.lo_deg() - r.den.lo_deg();
    for (int h = 0; h < out.hvalid; ++h) {
        MSlice& sl = out.s[h];
        if (sl.zero_claim()) sl = MSlice{};  // activate with inactive windows
        sl.w[v1] = VarWin{-WINF, -lo, -T, WINF};  // x_{v1}-exponent is -n
        sl.w[v2] = VarWin{lo, WINF, -WINF, T};
    }
    out.normalize();
    return out;
}

/// iota_21: expand r(u) in powers of 1/u (u = x2/x1 large).
inline MSeries iota_21(const RatExpr& r, const SCtx& ctx, long T, int v1 = 0, int v2 = 1) {
    // r(u) in 1/u equals (flip of r)(w) in w at 0, with w = 1/u = x1/x2.
    return iota_12(r.flip_u(), ctx, T, v2, v1);
}

/// subst_exp: evaluate r at u = xi^k e^x (variable v), q = e^hbar, exactly as
/// a truncated Laurent series in x (Laurent division handles zeros at x=0).
inline MSeries subst_exp(const RatExpr& r, const SCtx& ctx, long k, int v = 0) {
    auto eval = [&](const UPoly& p) {
        MSeries out = MSeries::zero(ctx);
        MSeries x = MSeries::monomial(ctx, Cyc(1), 0, v, 1);
        for (const auto& [n, c] : p.t) {
            MSeries e_nx = x.scaled(Cyc(Rat(n))).series_exp();
            out += e_nx.scaled(xi_pow(ctx.N, k * n)) * c.to_series(ctx);
        }
        return out;
    };
    MSeries num = eval(r.num);
    MSeries den = eval(r.den);
    return num * den.series_inverse();
}

} // namespace qvalab
