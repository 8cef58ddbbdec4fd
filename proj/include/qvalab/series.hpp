/**
 * @file series.hpp
 * @brief Truncated formal series in up to three variables over Q(xi)[[hbar]],
 *        with sound coefficient-validity tracking.
 *
 * MSeries models an element of K((x0,x1,x2))[[hbar]] truncated at a fixed
 * hbar order.  Each hbar slice stores a sparse exponent->coefficient map plus,
 * per variable, two intervals:
 *
 *   - support window [slo, shi]: a claim about the TRUE series -- every true
 *     coefficient with an exponent outside this interval (in that variable)
 *     vanishes.  +/-WINF mark unbounded support (e.g. delta distributions).
 *   - validity window [vlo, vhi]: inside the product rectangle of these
 *     intervals the stored coefficients equal the true ones; outside, the
 *     stored data says nothing.
 *
 * Every operation propagates both windows conservatively, so "this coefficient
 * is exact" can always be answered soundly.  Comparisons count coefficients
 * that are not provably exact as "skipped", never as "pass".
 *
 * A variable is inactive when its support window is [0,0] with full validity;
 * all formulas treat inactive variables uniformly.  A slice that is known to
 * be identically zero has empty support ([WINF,-WINF]) and full validity.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "scalar.hpp"

namespace qvalab {

inline constexpr int MAXV = 3;
inline constexpr long EXP_BIAS = 32768;

using ExpKey = std::uint64_t;
using Exps = std::array<long, MAXV>;

inline ExpKey encode_exps(const Exps& e) {
    ExpKey k = 0;
    for (int v = 0; v < MAXV; ++v) {
        long b = e[v] + EXP_BIAS;
        if (b < 0 || b > 0xFFFF) throw internal_error("exponent out of encodable range");
        k |= static_cast<ExpKey>(b) << (16 * v);
    }
    return k;
}

inline Exps decode_exps(ExpKey k) {
    Exps e;
    for (int v = 0; v < MAXV; ++v)
        e[v] = static_cast<long>((k >> (16 * v)) & 0xFFFF) - EXP_BIAS;
    return e;
}

/// Truncation context shared by all series in one computation.
struct SCtx {
    int N = 1;        // cyclotomic order of the coefficient field
    int H = 8;        // series are tracked modulo hbar^H
    long xmax = 12;   // default high-side exponent clip per variable

    std::array<long, MAXV> clip_hi{};
    std::array<long, MAXV> clip_lo{};

    SCtx() { set_default_clips(); }
    SCtx(int N_, int H_, long xmax_) : N(N_), H(H_), xmax(xmax_) {
        if (H < 1) throw config_error("hbar order must be >= 1");
        if (xmax < 1) throw config_error("x window must be >= 1");
        set_default_clips();
    }
    void set_default_clips() {
        for (int v = 0; v < MAXV; ++v) {
            clip_hi[v] = xmax;
            clip_lo[v] = -(xmax + H + 4);
        }
    }
    bool compatible(const SCtx& o) const { return N == o.N && H == o.H; }
};

/// Per-variable window pair of one hbar slice.
struct VarWin {
    long slo = 0, shi = 0;          // support claim (inactive-variable default)
    long vlo = -WINF, vhi = WINF;   // validity claim

    static VarWin inactive() { return VarWin{}; }
    static VarWin empty_supp() { return VarWin{WINF, -WINF, -WINF, WINF}; }
    static VarWin no_valid(long slo_, long shi_) { return VarWin{slo_, shi_, WINF, -WINF}; }

    bool supp_empty() const { return slo > shi; }
    bool fully_valid() const { return supp_empty() || (vlo <= slo && vhi >= shi); }
};

struct MSlice {
    std::map<ExpKey, Cyc> t;
    std::array<VarWin, MAXV> w;

    bool zero_claim() const {
        for (int v = 0; v < MAXV; ++v)
            if (w[v].supp_empty()) return true;
        return false;
    }
    static MSlice zero() {
        MSlice s;
        for (int v = 0; v < MAXV; ++v) s.w[v] = VarWin::empty_supp();
        return s;
    }
};

class MSeries {
public:
    SCtx ctx;
    std::vector<MSlice> s;  // size ctx.H
    int hvalid = 0;         // slices 0 .. hvalid-1 are trusted

    MSeries() : MSeries(SCtx{}) {}
    explicit MSeries(const SCtx& c) : ctx(c), s(c.H, MSlice::zero()), hvalid(c.H) {}

    static MSeries zero(const SCtx& c) { return MSeries(c); }

    static MSeries constant(const SCtx& c, const Cyc& val) {
        MSeries r(c);
        if (!val.is_zero()) {
            r.s[0] = MSlice{};  // all-inactive windows
            r.s[0].t[encode_exps({0, 0, 0})] = val;
        }
        return r;
    }
    static MSeries one(const SCtx& c) { return constant(c, Cyc(1)); }

    /// coeff * hbar^h * x_{v}^{e} (v < 0 gives a pure hbar monomial).
    static MSeries monomial(const SCtx& c, const Cyc& coeff, int h, int v, long e) {
        MSeries r(c);
        if (h >= c.H || coeff.is_zero()) return r;
        Exps ex{0, 0, 0};
        if (v >= 0) ex[v] = e;
        MSlice sl;  // inactive windows everywhere
        if (v >= 0) sl.w[v] = VarWin{e, e, -WINF, WINF};
        sl.t[encode_exps(ex)] = coeff;
        r.s[h] = std::move(sl);
        return r;
    }

    bool is_zero_claim() const {
        for (int h = 0; h < hvalid; ++h)
            if (!s[h].zero_claim()) return false;
        return true;
    }

    bool stored_empty() const {
        for (const auto& sl : s)
            if (!sl.t.empty()) return false;
        return true;
    }

    /// Exactness and value of one coefficient.  Exact if the point is inside
    /// the validity rectangle, or provably zero by the support claim.
    struct CoeffQ { Cyc value; bool exact; };
    CoeffQ coeff(int h, const Exps& e) const {
        if (h >= hvalid) return {Cyc(0), false};
        const MSlice& sl = s[h];
        bool outside_supp = false, inside_valid = true;
        for (int v = 0; v < MAXV; ++v) {
            if (e[v] < sl.w[v].slo || e[v] > sl.w[v].shi) outside_supp = true;
            if (e[v] < sl.w[v].vlo || e[v] > sl.w[v].vhi) inside_valid = false;
        }
        if (outside_supp) return {Cyc(0), true};
        if (!inside_valid) return {Cyc(0), false};
        auto it = sl.t.find(encode_exps(e));
        return {it == sl.t.end() ? Cyc(0) : it->second, true};
    }

    // ---- normalization ---------------------------------------------------

    void normalize() {
        if (hvalid > ctx.H) hvalid = ctx.H;
        if (hvalid < 0) hvalid = 0;
        for (int h = 0; h < ctx.H; ++h) {
            if (h >= hvalid) { s[h] = MSlice::zero(); continue; }
            normalize_slice(s[h]);
        }
    }

private:
    void normalize_slice(MSlice& sl) const {
        // If any support window is empty the slice is identically zero.
        for (int v = 0; v < MAXV; ++v) {
            if (sl.w[v].supp_empty()) { sl = MSlice::zero(); return; }
        }
        // Clip validity only when the clip can actually drop true support.
        for (int v = 0; v < MAXV; ++v) {
            VarWin& w = sl.w[v];
            if (w.shi > ctx.clip_hi[v]) w.vhi = std::min(w.vhi, ctx.clip_hi[v]);
            if (w.slo < ctx.clip_lo[v]) w.vlo = std::max(w.vlo, ctx.clip_lo[v]);
            if (!winf(w.vlo) && !winf(w.vhi) && w.vlo > w.vhi) { w.vlo = WINF; w.vhi = -WINF; }
            // A claim of exact infinite support cannot come from finite data.
            if (w.shi >= WINF && w.vhi >= WINF)
                throw internal_error("series invariant: unbounded support cannot be fully valid (high)");
            if (w.slo <= -WINF && w.vlo <= -WINF)
                throw internal_error("series invariant: unbounded support cannot be fully valid (low)");
        }
        // Prune stored keys to the provable-and-kept region.
        for (auto it = sl.t.begin(); it != sl.t.end();) {
            Exps e = decode_exps(it->first);
            bool keep = !it->second.is_zero();
            for (int v = 0; keep && v < MAXV; ++v) {
                const VarWin& w = sl.w[v];
                if (e[v] < w.slo || e[v] > w.shi) keep = false;
                if (e[v] < w.vlo || e[v] > w.vhi) keep = false;
            }
            it = keep ? std::next(it) : sl.t.erase(it);
        }
        // Fully valid and empty means exactly zero.
        if (sl.t.empty()) {
            bool fully = true;
            for (int v = 0; v < MAXV; ++v) fully = fully && sl.w[v].fully_valid();
            if (fully) { sl = MSlice::zero(); return; }
        }
        // Per-side support tightening: the low (high) end of the support
        // window in variable v may be pulled in to the stored data when that
        // end is covered by validity in v and every other variable is fully
        // valid (so the vanishing of the intervening coefficients is provable).
        for (int pass = 0; pass < 2; ++pass) {
            for (int v = 0; v < MAXV; ++v) {
                VarWin& w = sl.w[v];
                if (w.supp_empty()) { sl = MSlice::zero(); return; }
                bool others_valid = true;
                for (int u = 0; u < MAXV; ++u)
                    if (u != v && !sl.w[u].fully_valid()) others_valid = false;
                if (!others_valid) continue;
                long lo = WINF, hi = -WINF;
                for (const auto& [k, c] : sl.t) {
                    long ev = decode_exps(k)[v];
                    lo = std::min(lo, ev);
                    hi = std::max(hi, ev);
                }
                if (w.vlo <= w.slo)
                    w.slo = std::max(w.slo, sl.t.empty() ? wadd(w.vhi, 1) : lo);
                if (w.vhi >= w.shi)
                    w.shi = std::min(w.shi, sl.t.empty() ? wadd(w.vlo, -1) : hi);
                if (w.supp_empty()) { sl = MSlice::zero(); return; }
            }
        }
    }

    static SCtx merged_ctx(const MSeries& a, const MSeries& b) {
        if (!a.ctx.compatible(b.ctx))
            throw internal_error("series context mismatch");
        SCtx c = a.ctx;
        for (int v = 0; v < MAXV; ++v) {
            c.clip_hi[v] = std::min(c.clip_hi[v], b.ctx.clip_hi[v]);
            c.clip_lo[v] = std::max(c.clip_lo[v], b.ctx.clip_lo[v]);
        }
        c.xmax = std::min(c.xmax, b.ctx.xmax);
        return c;
    }

public:
    // ---- linear operations -----------------------------------------------

    friend MSeries operator+(const MSeries& a, const MSeries& b) {
        MSeries r(merged_ctx(a, b));
        r.hvalid = std::min(a.hvalid, b.hvalid);
        for (int h = 0; h < r.hvalid; ++h)
            r.s[h] = add_slices(a.s[h], b.s[h]);
        r.normalize();
        return r;
    }

    static MSlice add_slices(const MSlice& a, const MSlice& b) {
        MSlice r;
        for (int v = 0; v < MAXV; ++v) {
            r.w[v].slo = std::min(a.w[v].slo, b.w[v].slo);
            r.w[v].shi = std::max(a.w[v].shi, b.w[v].shi);
            r.w[v].vlo = std::max(a.w[v].vlo, b.w[v].vlo);
            r.w[v].vhi = std::min(a.w[v].vhi, b.w[v].vhi);
        }
        r.t = a.t;
        for (const auto& [k, c] : b.t) {
            auto [it, fresh] = r.t.emplace(k, c);
            if (!fresh) it->second += c;
        }
        return r;
    }

    MSeries operator-() const {
        MSeries r = *this;
        for (auto& sl : r.s)
            for (auto& [k, c] : sl.t) c = -c;
        return r;
    }
    friend MSeries operator-(const MSeries& a, const MSeries& b) { return a + (-b); }

    MSeries scaled(const Cyc& c) const {
        if (c.is_zero()) return MSeries::zero(ctx);
        MSeries r = *this;
        for (auto& sl : r.s)
            for (auto& [k, cc] : sl.t) cc *= c;
        return r;
    }

    MSeries& operator+=(const MSeries& b) { return *this = *this + b; }
    MSeries& operator-=(const MSeries& b) { return *this = *this - b; }

    // ---- multiplication ---------------------------------------------------

    friend MSeries operator*(const MSeries& a, const MSeries& b) {
        MSeries r(merged_ctx(a, b));
        r.hvalid = std::min(a.hvalid, b.hvalid);
        // Effective (tightened) operand slices.
        for (int h = 0; h < r.hvalid; ++h) {
            MSlice acc = MSlice::zero();
            bool first = true;
            for (int i = 0; i <= h; ++i) {
                MSlice c = conv_slices(a.s[i], b.s[h - i]);
                if (c.zero_claim() && !first) {
                    // exact-zero contribution: no constraint
                    continue;
                }
                acc = first ? std::move(c) : add_slices(acc, c);
                first = false;
            }
            r.s[h] = std::move(acc);
        }
        r.normalize();
        return r;
    }

    MSeries& operator*=(const MSeries& b) { return *this = *this * b; }

    /// Convolution of two slices with sound window propagation.
    static MSlice conv_slices(const MSlice& a, const MSlice& b) {
        if (a.zero_claim() || b.zero_claim()) return MSlice::zero();
        MSlice r;
        for (int v = 0; v < MAXV; ++v) {
            const VarWin& x = a.w[v];
            const VarWin& y = b.w[v];
            VarWin& o = r.w[v];
            o.slo = wadd(x.slo, y.slo);
            o.shi = wadd(x.shi, y.shi);
            // High side: contributions from an operand's unknown-high region
            // reach down to (that vhi + other slo); everything at or below
            // vhi + other.slo is exact.
            long h1 = (x.vhi >= x.shi) ? WINF : wadd(x.vhi, y.slo);
            long h2 = (y.vhi >= y.shi) ? WINF : wadd(y.vhi, x.slo);
            o.vhi = std::min(h1, h2);
            long l1 = (x.vlo <= x.slo) ? -WINF : wadd(x.vlo, y.shi);
            long l2 = (y.vlo <= y.slo) ? -WINF : wadd(y.vlo, x.shi);
            o.vlo = std::max(l1, l2);
        }
        for (const auto& [ka, ca] : a.t)
            for (const auto& [kb, cb] : b.t) {
                Exps ea = decode_exps(ka), eb = decode_exps(kb);
                Exps e;
                bool in = true;
                for (int v = 0; v < MAXV; ++v) {
                    e[v] = ea[v] + eb[v];
                    if (e[v] < r.w[v].vlo || e[v] > r.w[v].vhi) { in = false; break; }
                }
                if (!in) continue;
                Cyc p = ca * cb;
                if (p.is_zero()) continue;
                auto [it, fresh] = r.t.emplace(encode_exps(e), p);
                if (!fresh) it->second += p;
            }
        return r;
    }

    /// Multiply by coeff * x_v^e (exponent shift; windows shift exactly).
    MSeries mono_mul(int v, long e, const Cyc& coeff) const {
        if (coeff.is_zero()) return MSeries::zero(ctx);
        MSeries r(ctx);
        r.hvalid = hvalid;
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& a = s[h];
            if (a.zero_claim()) continue;
            MSlice o;
            o.w = a.w;
            o.w[v].slo = wadd(a.w[v].slo, e);
            o.w[v].shi = wadd(a.w[v].shi, e);
            o.w[v].vlo = wadd(a.w[v].vlo, e);
            o.w[v].vhi = wadd(a.w[v].vhi, e);
            for (const auto& [k, c] : a.t) {
                Exps ee = decode_exps(k);
                ee[v] += e;
                o.t[encode_exps(ee)] = c * coeff;
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }

    // ---- hbar shifts -------------------------------------------------------

    MSeries hbar_mul(int k = 1) const {
        if (k < 0) throw internal_error("hbar_mul: negative power");
        MSeries r(ctx);
        r.hvalid = std::min(ctx.H, hvalid + k);
        for (int h = ctx.H - 1; h >= k; --h) r.s[h] = s[h - k];
        r.normalize();
        return r;
    }

    /// Exact division by hbar^k; the low slices must hold no contrary data.
    /// Divisibility itself is the caller's mathematical guarantee.
    MSeries hbar_div(int k = 1) const {
        if (k < 0) throw internal_error("hbar_div: negative power");
        for (int h = 0; h < std::min(k, hvalid); ++h)
            if (!s[h].t.empty())
                throw internal_error("hbar_div: nonzero stored data in a slice being divided away");
        MSeries r(ctx);
        r.hvalid = std::max(0, hvalid - k);
        for (int h = 0; h + k < ctx.H; ++h) r.s[h] = s[h + k];
        r.normalize();
        return r;
    }

    // ---- derivatives -------------------------------------------------------

    /// d/dx_v.
    MSeries deriv(int v) const {
        MSeries r(ctx);
        r.hvalid = hvalid;
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& a = s[h];
            if (a.zero_claim()) continue;
            MSlice o;
            o.w = a.w;
            o.w[v].slo = wadd(a.w[v].slo, -1);
            o.w[v].shi = wadd(a.w[v].shi, -1);
            o.w[v].vlo = wadd(a.w[v].vlo, -1);
            o.w[v].vhi = wadd(a.w[v].vhi, -1);
            for (const auto& [k, c] : a.t) {
                Exps e = decode_exps(k);
                if (e[v] == 0) continue;
                Cyc nc = c * Cyc(Rat(e[v]));
                e[v] -= 1;
                o.t[encode_exps(e)] = nc;
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }

    /// x_v d/dx_v (exponent-preserving).
    MSeries xderiv(int v) const {
        MSeries r(ctx);
        r.hvalid = hvalid;
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& a = s[h];
            if (a.zero_claim()) continue;
            MSlice o;
            o.w = a.w;
            for (const auto& [k, c] : a.t) {
                Exps e = decode_exps(k);
                if (e[v] == 0) continue;
                o.t[k] = c * Cyc(Rat(e[v]));
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }

    // ---- variable shifts (q-operators) --------------------------------------

    /// f(..., x_v + c*hbar, ...) = exp(c hbar d/dx_v) f.
    MSeries shift_add(int v, const Rat& c) const {
        MSeries res = *this;
        MSeries cur = *this;
        for (int j = 1; j < ctx.H; ++j) {
            cur = cur.deriv(v).scaled(Cyc(c / j)).hbar_mul();
            if (cur.is_zero_claim()) break;
            res += cur;
        }
        return res;
    }

    /// f(..., e^{c hbar} x_v, ...) = exp(c hbar x_v d/dx_v) f.
    MSeries shift_mult(int v, const Rat& c) const {
        MSeries res = *this;
        MSeries cur = *this;
        for (int j = 1; j < ctx.H; ++j) {
            cur = cur.xderiv(v).scaled(Cyc(c / j)).hbar_mul();
            if (cur.is_zero_claim()) break;
            res += cur;
        }
        return res;
    }

    /// [m]_{q^{D}} f where q^{D} is shift_add (additive) or shift_mult
    /// (multiplicative) by one unit: sum_{j=0}^{m-1} q^{(m-1-2j)D} f.
    MSeries qbracket(long m, int v, bool multiplicative) const {
        if (m == 0) return MSeries::zero(ctx);
        if (m < 0) return -qbracket(-m, v, multiplicative);
        MSeries res = MSeries::zero(ctx);
        for (long j = 0; j < m; ++j) {
            Rat a(m - 1 - 2 * j);
            res += multiplicative ? shift_mult(v, a) : shift_add(v, a);
        }
        return res;
    }

    // ---- analytic operations (single-variable + hbar) ------------------------

    bool var_inactive(int v) const {
        for (int h = 0; h < hvalid; ++h) {
            const VarWin& w = s[h].w[v];
            if (w.supp_empty()) continue;
            if (!(w.slo == 0 && w.shi == 0)) return false;
        }
        return true;
    }

private:
    void require_var0_only(const char* what) const {
        if (!var_inactive(1) || !var_inactive(2))
            throw internal_error(std::string(what) + ": only the first variable may be active");
    }

    /// True when no stored or claimable data remains inside the clip region,
    /// so multiplying further by positive-weight series stays invisible.
    bool dead_by_clip_or_zero() const {
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& sl = s[h];
            if (sl.zero_claim()) continue;
            if (sl.w[0].slo <= ctx.clip_hi[0]) return false;
        }
        return true;
    }

    /// Evaluate sum_n coeffs(n) * g^n where g has positive weight
    /// (hbar-order >= 1 or x-order >= 1 termwise).  coeffs(0) must be the
    /// constant term.  Sound under clipping: if the tail is killed by the
    /// high-side clip rather than by true vanishing, the support claim of the
    /// result is widened to "unbounded above".
    template <class CoeffFn>
    MSeries power_series_in(const MSeries& g, CoeffFn coeffs) const {
        g.check_positive_weight();
        MSeries acc = MSeries::constant(g.ctx, Cyc(coeffs(0)));
        MSeries pw = MSeries::one(g.ctx);
        long cap = 16L * (g.ctx.H * (g.ctx.xmax + g.ctx.H + 6) + g.ctx.xmax) + 64;
        for (long n = 1; n <= cap; ++n) {
            pw *= g;
            if (pw.is_zero_claim()) return acc;
            if (pw.dead_by_clip_or_zero()) {
                // Remaining terms live entirely above the clip: widen support.
                for (int h = 0; h < acc.hvalid; ++h)
                    if (!pw.s[h].zero_claim() || !acc.s[h].zero_claim())
                        acc.s[h].w[0].shi = WINF;
                acc.normalize();
                return acc;
            }
            Rat cn = coeffs(n);
            if (cn != 0) acc += pw.scaled(Cyc(cn));
        }
        throw internal_error("power_series_in: did not terminate (weight condition violated?)");
    }

    void check_positive_weight() const {
        // hbar^0 slice must have x-order >= 1 in var 0 and no other variables.
        require_var0_only("analytic operation");
        if (hvalid < 1) return;
        const MSlice& sl0 = s[0];
        if (!sl0.zero_claim() && sl0.w[0].slo < 1)
            throw internal_error("analytic operation: hbar^0 part must vanish at the origin");
    }

public:
    /// exp(f) for f with positive weight.
    MSeries series_exp() const {
        std::vector<Rat> inv_fact(1, Rat(1));
        return power_series_in(*this, [&](long n) {
            while (static_cast<long>(inv_fact.size()) <= n)
                inv_fact.push_back(inv_fact.back() / static_cast<long>(inv_fact.size()));
            return inv_fact[n];
        });
    }

    /// log(f) for f = 1 + g with g of positive weight.
    MSeries series_log() const {
        MSeries g = *this - MSeries::one(ctx);
        return g.power_series_in(g, [](long n) {
            if (n == 0) return Rat(0);
            return Rat((n % 2 == 1) ? 1 : -1, n);
        });
    }

    /// Multiplicative inverse of c x^m (1 + g).  Requires a fully validated
    /// hbar^0 leading term.
    MSeries series_inverse() const {
        require_var0_only("series_inverse");
        if (hvalid < 1 || s[0].zero_claim() || s[0].t.empty())
            throw internal_error("series_inverse: no hbar^0 leading term");
        const MSlice& sl0 = s[0];
        if (sl0.w[0].vlo > sl0.w[0].slo)
            throw internal_error("series_inverse: leading term not validated");
        long m = WINF;
        for (const auto& [k, c] : sl0.t) m = std::min(m, decode_exps(k)[0]);
        if (m != sl0.w[0].slo)
            throw internal_error("series_inverse: leading coefficient not certain");
        Cyc lead = sl0.t.at(encode_exps({m, 0, 0}));
        MSeries g = mono_mul(0, -m, lead.inverse()) - MSeries::one(ctx);
        MSeries inv_unit = g.power_series_in(g, [](long n) { return Rat((n % 2 == 0) ? 1 : -1); });
        return inv_unit.mono_mul(0, -m, lead.inverse());
    }

    /// (1+g)^{1/2} for g of positive weight; constant term must be exactly 1.
    MSeries series_sqrt() const {
        CoeffQ c0 = coeff(0, {0, 0, 0});
        if (!c0.exact || c0.value != Cyc(1))
            throw internal_error("series_sqrt: constant term must be exactly 1");
        MSeries g = *this - MSeries::one(ctx);
        std::vector<Rat> binom(1, Rat(1));
        return g.power_series_in(g, [&](long n) {
            while (static_cast<long>(binom.size()) <= n) {
                long k = static_cast<long>(binom.size());
                binom.push_back(binom.back() * Rat(3 - 2 * k, 2) / k);
            }
            return binom[n];
        });
    }

    // ---- coefficient extraction ----------------------------------------------

    /// Coefficient of x_v^e, as a series in the remaining variables.
    MSeries extract_var_coeff(int v, long e) const {
        MSeries r(ctx);
        r.hvalid = hvalid;
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& a = s[h];
            if (a.zero_claim()) continue;
            const VarWin& wv = a.w[v];
            if (e < wv.slo || e > wv.shi) continue;  // exactly zero slice
            MSlice o;
            o.w = a.w;
            o.w[v] = VarWin::inactive();
            if (e < wv.vlo || e > wv.vhi) {
                // Inside claimed support but not validated: nothing is known.
                for (int u = 0; u < MAXV; ++u)
                    if (u != v) { o.w[u].vlo = WINF; o.w[u].vhi = -WINF; }
            } else {
                for (const auto& [k, c] : a.t) {
                    Exps ee = decode_exps(k);
                    if (ee[v] != e) continue;
                    ee[v] = 0;
                    o.t[encode_exps(ee)] = c;
                }
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }

    /// Formal residue in x_v (coefficient of x_v^{-1}).
    MSeries residue(int v) const { return extract_var_coeff(v, -1); }

    // ---- variable substitution -------------------------------------------------

    /// Substitute x_v := e^{c hbar} x_tv, merging variable v into tv (v != tv).
    /// The result no longer involves x_v.
    MSeries specialize(int v, int tv, const Rat& c) const {
        if (v == tv) throw internal_error("specialize: identical variables");
        MSeries base = (c == 0) ? *this : shift_mult(v, c);
        MSeries r(ctx);
        r.hvalid = base.hvalid;
        for (int h = 0; h < base.hvalid; ++h) {
            const MSlice& a = base.s[h];
            if (a.zero_claim()) continue;
            MSlice o;
            o.w = a.w;
            const VarWin& x = a.w[v];
            const VarWin& y = a.w[tv];
            VarWin m;
            m.slo = wadd(x.slo, y.slo);
            m.shi = wadd(x.shi, y.shi);
            long h1 = (x.vhi >= x.shi) ? WINF : wadd(x.vhi, y.slo);
            long h2 = (y.vhi >= y.shi) ? WINF : wadd(y.vhi, x.slo);
            m.vhi = std::min(h1, h2);
            long l1 = (x.vlo <= x.slo) ? -WINF : wadd(x.vlo, y.shi);
            long l2 = (y.vlo <= y.slo) ? -WINF : wadd(y.vlo, x.shi);
            m.vlo = std::max(l1, l2);
            o.w[tv] = m;
            o.w[v] = VarWin::inactive();
            for (const auto& [k, cc] : a.t) {
                Exps e = decode_exps(k);
                e[tv] += e[v];
                e[v] = 0;
                if (e[tv] < m.vlo || e[tv] > m.vhi) continue;
                auto [it, fresh] = o.t.emplace(encode_exps(e), cc);
                if (!fresh) it->second += cc;
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }

    /// Substitute x_v := x_tv e^{z}, where z is the (previously inactive)
    /// variable zv, truncating z-degrees above zhi.  Used for residue-in-z
    /// compositions: x_v^{e} -> x_tv^{e} sum_j (e z)^j / j!.
    MSeries subst_ez(int v, int tv, int zv, long zhi) const {
        if (v == tv || v == zv || tv == zv)
            throw internal_error("subst_ez: variables must be distinct");
        if (!var_inactive(zv))
            throw internal_error("subst_ez: target z-variable already active");
        MSeries r(ctx);
        r.ctx.clip_hi[zv] = std::min(r.ctx.clip_hi[zv], zhi);
        r.hvalid = hvalid;
        std::vector<Rat> inv_fact(1, Rat(1));
        for (long j = 1; j <= zhi; ++j) inv_fact.push_back(inv_fact.back() / j);
        for (int h = 0; h < hvalid; ++h) {
            const MSlice& a = s[h];
            if (a.zero_claim()) continue;
            MSlice o;
            o.w = a.w;
            const VarWin& x = a.w[v];
            const VarWin& y = a.w[tv];
            VarWin m;  // merged tv window: same rule as specialize
            m.slo = wadd(x.slo, y.slo);
            m.shi = wadd(x.shi, y.shi);
            long h1 = (x.vhi >= x.shi) ? WINF : wadd(x.vhi, y.slo);
            long h2 = (y.vhi >= y.shi) ? WINF : wadd(y.vhi, x.slo);
            m.vhi = std::min(h1, h2);
            long l1 = (x.vlo <= x.slo) ? -WINF : wadd(x.vlo, y.shi);
            long l2 = (y.vlo <= y.slo) ? -WINF : wadd(y.vlo, x.shi);
            m.vlo = std::max(l1, l2);
            o.w[tv] = m;
            o.w[v] = VarWin::inactive();
            // z-window: true support is [0, inf); validity in z requires every
            // contributing (v,tv) coefficient to be exact, i.e. the merged
            // validity in tv; we claim z-exactness only when the slice was
            // fully valid in v and tv, else nothing in z.
            bool vt_fully = x.fully_valid() && y.fully_valid();
            VarWin wz;
            wz.slo = 0;
            wz.shi = WINF;
            if (vt_fully) { wz.vlo = -WINF; wz.vhi = zhi; }
            else { wz.vlo = WINF; wz.vhi = -WINF; }
            o.w[zv] = wz;
            if (vt_fully) {
                for (const auto& [k, cc] : a.t) {
                    Exps e = decode_exps(k);
                    long ev = e[v];
                    e[tv] += ev;
                    e[v] = 0;
                    Rat p(1);
                    for (long j = 0; j <= zhi; ++j) {
                        e[zv] = j;
                        Cyc term = cc * Cyc(p * inv_fact[j]);
                        if (!term.is_zero()) {
                            auto [it, fresh] = o.t.emplace(encode_exps(e), term);
                            if (!fresh) it->second += term;
                        }
                        p *= ev;
                        if (ev == 0) break;
                    }
                }
            }
            r.s[h] = std::move(o);
        }
        r.normalize();
        return r;
    }
};

// ---- distributions and comparisons ------------------------------------------

/// delta(xi^{-k} x_{v2} / x_{v1}) = sum_n xi^{-kn} x_{v2}^n x_{v1}^{-n},
/// stored for |n| <= M (the validity window); true support is unbounded.
inline MSeries delta_window(const SCtx& ctx, int k, long M, int v1 = 0, int v2 = 1) {
    MSeries r(ctx);
    MSlice sl;
    sl.w[v1] = VarWin{-WINF, WINF, -M, M};
    sl.w[v2] = VarWin{-WINF, WINF, -M, M};
    for (long n = -M; n <= M; ++n) {
        Exps e{0, 0, 0};
        e[v1] = -n;
        e[v2] = n;
        sl.t[encode_exps(e)] = xi_pow(ctx.N, -static_cast<long>(k) * n);
    }
    r.s[0] = std::move(sl);
    r.normalize();
    return r;
}

/// Scalar series q^c = e^{c hbar}.
inline MSeries qpow_series(const SCtx& ctx, const Rat& c) {
    MSeries r = MSeries::one(ctx);
    Rat p(1);
    for (int h = 1; h < ctx.H; ++h) {
        p = p * c / h;
        if (p == 0) break;
        r += MSeries::monomial(ctx, Cyc(p), h, -1, 0);
    }
    return r;
}

struct CompareResult {
    long passed = 0;
    long failed = 0;
    long skipped = 0;
    bool ok() const { return failed == 0 && passed > 0; }
    bool strict_ok() const { return failed == 0 && skipped == 0 && passed > 0; }
    std::string first_mismatch;
};

/// Pointwise comparison of two series over |e_v| <= region (active variables)
/// and hbar order < hmax.  A point counts as passed only when both sides are
/// provably exact there; otherwise it is skipped.
inline CompareResult dist_equal(const MSeries& a, const MSeries& b, long region, int hmax = -1) {
    CompareResult res;
    if (hmax < 0) hmax = std::min(a.hvalid, b.hvalid);
    bool active[MAXV];
    for (int v = 0; v < MAXV; ++v)
        active[v] = !(a.var_inactive(v) && b.var_inactive(v));
    Exps e{0, 0, 0};
    std::array<long, MAXV> lo{}, hi{};
    for (int v = 0; v < MAXV; ++v) {
        lo[v] = active[v] ? -region : 0;
        hi[v] = active[v] ? region : 0;
    }
    for (int h = 0; h < hmax; ++h)
        for (long e0 = lo[0]; e0 <= hi[0]; ++e0)
            for (long e1 = lo[1]; e1 <= hi[1]; ++e1)
                for (long e2 = lo[2]; e2 <= hi[2]; ++e2) {
                    e = {e0, e1, e2};
                    auto ca = a.coeff(h, e);
                    auto cb = b.coeff(h, e);
                    if (!ca.exact || !cb.exact) { ++res.skipped; continue; }
                    if (ca.value == cb.value) ++res.passed;
                    else {
                        ++res.failed;
                        if (res.first_mismatch.empty())
                            res.first_mismatch =
                                "h=" + std::to_string(h) + " e=(" + std::to_string(e0) + "," +
                                std::to_string(e1) + "," + std::to_string(e2) + ") lhs=" +
                                ca.value.to_string() + " rhs=" + cb.value.to_string();
                    }
                }
    return res;
}

/// Comparison against zero.
inline CompareResult dist_zero(const MSeries& a, long region, int hmax = -1) {
    return dist_equal(a, MSeries::zero(a.ctx), region, hmax < 0 ? a.hvalid : hmax);
}

// Interface aliases.
inline MSeries series_mul(const MSeries& a, const MSeries& b) { return a * b; }
inline MSeries series_exp(const MSeries& f) { return f.series_exp(); }
inline MSeries series_log(const MSeries& f) { return f.series_log(); }
inline MSeries hbar_shift(const MSeries& f, int v, const Rat& c) { return f.shift_add(v, c); }
inline MSeries qbracket_op(const MSeries& f, long m, int v, bool multiplicative) {
    return f.qbracket(m, v, multiplicative);
}
inline MSeries residue_coeff(const MSeries& f, int v) { return f.residue(v); }

} // namespace qvalab
