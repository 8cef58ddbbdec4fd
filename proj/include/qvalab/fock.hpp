/**
 * @file fock.hpp
 * @brief Lattice Fock modules: basis vectors indexed by a multiset of
 *        Heisenberg creation modes and a lattice group element, with
 *        truncated-series coefficients.
 *
 * Exactness bookkeeping: a missing key normally means "coefficient is exactly
 * zero".  Exponentials of creation operators are infinite sums, so they are
 * applied with a level cap; every dropped term's coefficient carries an
 * x-exponent (in the operator variable) above a recorded threshold.  The
 * per-variable `spoiled` bound remembers this: extraction widens support and
 * clamps validity so no dropped contribution is ever claimed exact.
 */

#pragma once

#include <compare>
#include <functional>

#include "root.hpp"
#include "series.hpp"

namespace qvalab {

struct FockKey {
    std::vector<std::pair<int, long>> modes;  // sorted (node, level >= 1)
    LVec grp;

    auto operator<=>(const FockKey&) const = default;

    long level() const {
        long s = 0;
        for (const auto& [j, n] : modes) s += n;
        return s;
    }

    FockKey with_mode(int j, long n) const {
        FockKey r = *this;
        r.modes.emplace_back(j, n);
        std::sort(r.modes.begin(), r.modes.end());
        return r;
    }
};

class FockVec {
public:
    SCtx ctx;
    const RootDatum* d = nullptr;
    const EpsilonCocycle* eps = nullptr;
    std::map<FockKey, MSeries> t;
    // Exactness threshold per variable: contributions whose coefficient
    // x_v-exponent exceeds spoiled[v] may have been dropped.
    std::array<long, MAXV> spoiled{WINF, WINF, WINF};

    FockVec() = default;
    FockVec(const SCtx& c, const RootDatum* dd, const EpsilonCocycle* e)
        : ctx(c), d(dd), eps(e) {}

    static FockVec vacuum(const SCtx& c, const RootDatum* dd, const EpsilonCocycle* e,
                          const LVec& grp) {
        FockVec r(c, dd, e);
        FockKey k;
        k.grp = grp;
        r.t[k] = MSeries::one(c);
        return r;
    }

    bool empty_claim() const {
        for (const auto& [k, c] : t)
            if (!c.is_zero_claim()) return false;
        return true;
    }

    void prune() {
        for (auto it = t.begin(); it != t.end();)
            it = it->second.is_zero_claim() ? t.erase(it) : std::next(it);
    }

    void add_term(const FockKey& k, const MSeries& c) {
        auto [it, fresh] = t.emplace(k, c);
        if (!fresh) it->second += c;
    }

    friend FockVec operator+(const FockVec& a, const FockVec& b) {
        FockVec r = a;
        for (const auto& [k, c] : b.t) r.add_term(k, c);
        for (int v = 0; v < MAXV; ++v)
            r.spoiled[v] = std::min(a.spoiled[v], b.spoiled[v]);
        r.prune();
        return r;
    }
    FockVec& operator+=(const FockVec& b) { return *this = *this + b; }
    FockVec operator-() const {
        FockVec r = *this;
        for (auto& [k, c] : r.t) c = -c;
        return r;
    }
    friend FockVec operator-(const FockVec& a, const FockVec& b) { return a + (-b); }

    FockVec scaled(const MSeries& s) const {
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        r.spoil_shift_for(s);
        for (const auto& [k, c] : t) r.t[k] = c * s;
        r.prune();
        return r;
    }

    /// Per-key scalar depending on the group element (e.g. q^{c <alpha, beta>}).
    FockVec scale_by_grp(const std::function<MSeries(const LVec&)>& f) const {
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        for (const auto& [k, c] : t) {
            MSeries s = f(k.grp);
            r.spoil_shift_for(s);
            r.t[k] = c * s;
        }
        r.prune();
        return r;
    }

    long max_level() const {
        long m = 0;
        for (const auto& [k, c] : t) m = std::max(m, k.level());
        return m;
    }

    /// Minimum x_v-exponent over all coefficient support claims; throws if
    /// unbounded below (then no sound creation cap exists).
    long min_x_exponent(int v) const {
        long mn = 0;
        for (const auto& [k, c] : t)
            for (int h = 0; h < c.hvalid; ++h) {
                const VarWin& w = c.s[h].w[v];
                if (w.supp_empty()) continue;
                if (w.slo <= -WINF)
                    throw internal_error("fock: coefficient unbounded below in operator variable");
                mn = std::min(mn, w.slo);
            }
        return mn;
    }

    /// Minimum x_v-exponent a multiplier series can contribute (0 if the
    /// variable is inactive); used to shift spoiled thresholds soundly.
    static long mult_min_exp(const MSeries& s, int v) {
        long mn = 0;
        for (int h = 0; h < s.hvalid; ++h) {
            const VarWin& w = s.s[h].w[v];
            if (w.supp_empty()) continue;
            mn = std::min(mn, w.slo);
        }
        return mn;
    }

    /// Lower the spoiled thresholds for a multiplication by s: dropped
    /// contributions (exponent > spoiled[v]) become exponent > spoiled[v] + e
    /// for every multiplier exponent e >= mult_min_exp(s, v).
    void spoil_shift_for(const MSeries& s) {
        for (int v = 0; v < MAXV; ++v) {
            if (spoiled[v] >= WINF) continue;
            long mn = mult_min_exp(s, v);
            if (mn <= -WINF)
                throw internal_error("fock: multiplier unbounded below in a spoiled variable");
            if (mn < 0) spoiled[v] = wadd(spoiled[v], mn);
        }
    }

    /// Annihilation-type coefficients must not carry negative powers of a
    /// spoiled variable: dropped high-level towers could re-enter the kept
    /// region below the recorded threshold.
    void require_annihilation_sound(const MSeries& s) const {
        for (int v = 0; v < MAXV; ++v)
            if (spoiled[v] < WINF && mult_min_exp(s, v) < 0)
                throw internal_error(
                    "fock: annihilation coefficient has negative powers of a spoiled variable");
    }

    // ---- elementary mode actions --------------------------------------------

    /// alpha_j(-n) w (creation), n >= 1, coefficient multiplied by c.
    FockVec created(int j, long n, const MSeries& c) const {
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        r.spoil_shift_for(c);
        for (const auto& [k, co] : t) r.add_term(k.with_mode(j, n), co * c);
        r.prune();
        return r;
    }

    /// alpha_i(n) w (annihilation), n >= 1: contraction against each matching
    /// creation mode with factor n <alpha_i, alpha_j>.
    FockVec annihilated(int i, long n, const MSeries& c) const {
        require_annihilation_sound(c);
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        for (const auto& [k, co] : t)
            for (std::size_t m = 0; m < k.modes.size(); ++m) {
                if (m > 0 && k.modes[m] == k.modes[m - 1]) continue;  // same slot
                auto [j, lev] = k.modes[m];
                if (lev != n) continue;
                long mult = 0;
                for (const auto& md : k.modes)
                    if (md == k.modes[m]) ++mult;
                long pair = d->a(i, j);
                if (pair == 0) continue;
                FockKey nk = k;
                nk.modes.erase(nk.modes.begin() + static_cast<long>(m));
                r.add_term(nk, co * c.scaled(Cyc(Rat(mult * n * pair))));
            }
        r.prune();
        return r;
    }

    /// alpha_i(0) w: diagonal, <alpha_i, grp>.
    FockVec zero_mode(int i) const {
        LVec ai = RootDatum::simple(d->rank, i);
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        for (const auto& [k, co] : t) {
            long p = d->pairing(ai, k.grp);
            if (p != 0) r.t[k] = co.scaled(Cyc(Rat(p)));
        }
        r.prune();
        return r;
    }

    /// e_beta w: group translation with the epsilon cocycle sign.
    FockVec group_mult(const LVec& beta) const {
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        for (const auto& [k, co] : t) {
            FockKey nk = k;
            for (int i = 0; i < d->rank; ++i) nk.grp[i] += beta[i];
            int sign = (*eps)(beta, k.grp);
            r.add_term(nk, sign == 1 ? co : -co);
        }
        return r;
    }

    /// x_v^{<beta, grp>} w: coefficient exponent shift per key.
    FockVec xpow_pairing(int v, const LVec& beta) const {
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        for (const auto& [k, co] : t) {
            long p = d->pairing(beta, k.grp);
            if (r.spoiled[v] < WINF && p < 0) r.spoiled[v] = wadd(r.spoiled[v], p);
            r.t[k] = co.mono_mul(v, p, Cyc(1));
        }
        return r;
    }

    // ---- exponentials of mode sums -------------------------------------------

    /// exp( sum_{j,n>=1} coeff(j,n) alpha_j(-n) ) w, where coeff(j,n) includes
    /// the variable factor and has x_v-exponent >= n.  Each generated term is
    /// kept only while its coefficient x_v-exponent can stay at or below
    /// exact_to; every dropped term's coefficient exponent exceeds exact_to,
    /// so lowering the spoiled bound to exact_to records the loss soundly.
    FockVec exp_create(int v, const std::function<MSeries(int, long)>& coeff,
                       long exact_to) const {
        long mn = min_x_exponent(v);
        std::map<std::pair<int, long>, MSeries> ccache;
        auto get_coeff = [&](int j, long n) -> const MSeries& {
            auto it = ccache.find({j, n});
            if (it == ccache.end()) it = ccache.emplace(std::make_pair(j, n), coeff(j, n)).first;
            return it->second;
        };
        FockVec acc = *this;
        FockVec cur = *this;
        long kmax = std::max<long>(exact_to - mn + 2, 1);
        for (long k = 1; k <= kmax && !cur.t.empty(); ++k) {
            FockVec nxt(ctx, d, eps);
            nxt.spoiled = cur.spoiled;
            for (const auto& [key, co] : cur.t) {
                long m0 = WINF;
                for (int h = 0; h < co.hvalid; ++h) {
                    const VarWin& w = co.s[h].w[v];
                    if (w.supp_empty()) continue;
                    if (w.slo <= -WINF)
                        throw internal_error("exp_create: coefficient unbounded below");
                    m0 = std::min(m0, w.slo);
                }
                if (m0 >= WINF) continue;
                for (int j = 0; j < d->rank; ++j)
                    for (long n = 1; n + m0 <= exact_to; ++n) {
                        const MSeries& c = get_coeff(j, n);
                        if (c.is_zero_claim()) continue;
                        nxt.add_term(key.with_mode(j, n), co * c.scaled(Cyc(Rat(1, k))));
                    }
            }
            nxt.prune();
            cur = std::move(nxt);
            acc += cur;
        }
        acc.spoiled[v] = std::min(acc.spoiled[v], exact_to);
        return acc;
    }

    /// exp( sum_{j,n>=1} coeff(j,n) alpha_j(-n) ) w where every coeff(j,n) has
    /// hbar-order >= n (no operator variable needed): the dropped tail is
    /// beyond the hbar truncation, so the result is exact and unspoiled.
    FockVec exp_create_exact(const std::function<MSeries(int, long)>& coeff) const {
        long D = ctx.H - 1;
        long L0 = max_level();
        FockVec acc = *this;
        FockVec cur = *this;
        for (long k = 1; k <= L0 + D && !cur.t.empty(); ++k) {
            FockVec nxt(ctx, d, eps);
            nxt.spoiled = cur.spoiled;
            for (int j = 0; j < d->rank; ++j)
                for (long n = 1; n <= D; ++n) {
                    MSeries c = coeff(j, n);
                    if (c.is_zero_claim()) continue;
                    for (int h = 0; h < std::min<long>(n, c.hvalid); ++h)
                        if (!c.s[h].zero_claim())
                            throw internal_error(
                                "exp_create_exact: coefficient hbar-order below created level");
                    for (const auto& [key, co] : cur.t) {
                        if (key.level() + n > L0 + D) continue;
                        nxt.add_term(key.with_mode(j, n), co * c.scaled(Cyc(Rat(1, k))));
                    }
                }
            nxt.prune();
            cur = std::move(nxt);
            acc += cur;
        }
        return acc;
    }

    /// exp( sum_{j,n>=1} coeff(j,n) alpha_j(n) ) w: nilpotent, exact.
    FockVec exp_annihilate(const std::function<MSeries(int, long)>& coeff) const {
        long L0 = max_level();
        FockVec acc = *this;
        FockVec cur = *this;
        for (long k = 1; k <= L0 && !cur.t.empty(); ++k) {
            FockVec nxt(ctx, d, eps);
            nxt.spoiled = cur.spoiled;
            for (int j = 0; j < d->rank; ++j)
                for (long n = 1; n <= L0; ++n) {
                    MSeries c = coeff(j, n);
                    if (c.is_zero_claim()) continue;
                    nxt += cur.annihilated(j, n, c.scaled(Cyc(Rat(1, k))));
                }
            nxt.prune();
            cur = std::move(nxt);
            acc += cur;
        }
        return acc;
    }

    /// Linear field application:
    ///   w -> sum_{j,n>=1} cr(j,n) alpha_j(-n) w + sum_{j,n>=1} an(j,n) alpha_j(n) w
    ///        + sum_j z(j) alpha_j(0) w.
    /// Creation terms with coefficient x_v-exponent beyond exact_to are dropped
    /// (spoiling), annihilation and zero-mode parts are exact.
    FockVec apply_linear(int v, const std::function<MSeries(int, long)>& cr,
                         const std::function<MSeries(int, long)>& an,
                         const std::function<MSeries(int)>& z, long exact_to,
                         long off = 0) const {
        long mn = min_x_exponent(v);
        long D = exact_to - mn - off + 1;
        if (D < 0) D = 0;
        long L0 = max_level();
        FockVec r(ctx, d, eps);
        r.spoiled = spoiled;
        bool has_creation = false;
        for (int j = 0; j < d->rank; ++j) {
            for (long n = 1; n <= D; ++n) {
                MSeries c = cr(j, n);
                if (c.is_zero_claim()) continue;
                has_creation = true;
                r += created(j, n, c);
            }
            for (long n = 1; n <= L0; ++n) {
                MSeries c = an(j, n);
                if (!c.is_zero_claim()) r += annihilated(j, n, c);
            }
            MSeries cz = z(j);
            if (!cz.is_zero_claim()) r += zero_mode(j).scaled(cz);
        }
        // The creation tail is presumed infinite: spoil whenever present.
        if (has_creation || D <= 0)
            r.spoiled[v] = std::min(r.spoiled[v], exact_to);
        r.prune();
        return r;
    }

    // ---- extraction -----------------------------------------------------------

    /// Honest coefficient of one basis key: the stored series with support
    /// widened and validity clamped wherever creation caps may have dropped
    /// contributions.
    MSeries extract(const FockKey& k) const {
        MSeries r;
        auto it = t.find(k);
        r = (it == t.end()) ? MSeries::zero(ctx) : it->second;
        bool any = false;
        for (int v = 0; v < MAXV; ++v)
            if (spoiled[v] < WINF) any = true;
        if (!any) return r;
        for (int h = 0; h < r.hvalid; ++h) {
            MSlice& sl = r.s[h];
            bool was_zero = sl.zero_claim();
            if (was_zero) sl = MSlice{};  // activate with inactive windows
            for (int v = 0; v < MAXV; ++v) {
                if (spoiled[v] >= WINF) continue;
                VarWin& w = sl.w[v];
                if (was_zero) {
                    w = VarWin{wadd(spoiled[v], 1), WINF, -WINF, spoiled[v]};
                } else {
                    w.slo = std::min(w.slo, wadd(spoiled[v], 1));
                    w.shi = WINF;
                    w.vhi = std::min(w.vhi, spoiled[v]);
                }
            }
        }
        r.normalize();
        return r;
    }

    /// All keys present in the stored data (missing keys may still be nonzero
    /// above the spoiled thresholds; extract() reports that honestly).
    std::vector<FockKey> keys() const {
        std::vector<FockKey> r;
        for (const auto& [k, c] : t) r.push_back(k);
        return r;
    }
};

/// d/dx_v applied coefficientwise; dropped contributions lose one exponent,
/// so the spoiled threshold drops by one.
inline FockVec fock_deriv(const FockVec& w, int v) {
    FockVec r(w.ctx, w.d, w.eps);
    r.spoiled = w.spoiled;
    if (r.spoiled[v] < WINF) r.spoiled[v] = wadd(r.spoiled[v], -1);
    for (const auto& [k, c] : w.t) r.t[k] = c.deriv(v);
    r.prune();
    return r;
}

/// x_v d/dx_v applied coefficientwise (exponents unchanged).
inline FockVec fock_xderiv(const FockVec& w, int v) {
    FockVec r(w.ctx, w.d, w.eps);
    r.spoiled = w.spoiled;
    for (const auto& [k, c] : w.t) r.t[k] = c.xderiv(v);
    r.prune();
    return r;
}

/// Coefficient of x_v^e of a module-vector-valued series, honestly extracted:
/// spoiled thresholds in x_v are honored (unknown when e exceeds them) and the
/// variable is eliminated from the result.
inline FockVec fock_var_coeff(const FockVec& w, int v, long e) {
    if (e > w.spoiled[v])
        throw internal_error("fock_var_coeff: exponent beyond the exactness threshold");
    FockVec r(w.ctx, w.d, w.eps);
    r.spoiled = w.spoiled;
    r.spoiled[v] = WINF;
    for (const auto& [k, c] : w.t) r.t[k] = w.extract(k).extract_var_coeff(v, e);
    r.prune();
    return r;
}

/// Coefficientwise division by hbar^k (each coefficient must be divisible;
/// the hbar validity depth drops by k).
inline FockVec fock_hbar_div(const FockVec& w, int k = 1) {
    FockVec r(w.ctx, w.d, w.eps);
    r.spoiled = w.spoiled;
    for (const auto& [key, c] : w.t) r.t[key] = c.hbar_div(k);
    r.prune();
    return r;
}

/// Formal residue in x_v (coefficient of x_v^{-1}).
inline FockVec fock_residue(const FockVec& w, int v) { return fock_var_coeff(w, v, -1); }

/// Pointwise comparison of two module vectors over the union of their keys.
inline CompareResult fock_equal(const FockVec& a, const FockVec& b, long region,
                                int hmax = -1) {
    CompareResult res;
    std::map<FockKey, int> allk;
    for (const auto& [k, c] : a.t) allk[k] = 1;
    for (const auto& [k, c] : b.t) allk[k] = 1;
    if (allk.empty()) {
        // Both claim zero everywhere (up to spoiling); compare the empty claim.
        auto cmp = dist_equal(a.extract(FockKey{{}, LVec(a.d ? a.d->rank : 0, 0)}),
                              b.extract(FockKey{{}, LVec(b.d ? b.d->rank : 0, 0)}), region,
                              hmax);
        return cmp;
    }
    for (const auto& [k, one] : allk) {
        auto cmp = dist_equal(a.extract(k), b.extract(k), region, hmax);
        res.passed += cmp.passed;
        res.failed += cmp.failed;
        res.skipped += cmp.skipped;
        if (res.first_mismatch.empty() && !cmp.first_mismatch.empty())
            res.first_mismatch = cmp.first_mismatch;
    }
    return res;
}

inline CompareResult fock_zero(const FockVec& a, long region, int hmax = -1) {
    FockVec z(a.ctx, a.d, a.eps);
    z.spoiled = a.spoiled;
    return fock_equal(a, z, region, hmax);
}

} // namespace qvalab
