// Structure series: the C-matrix, theta series, eta pairings, kappa series,
// exchange rationals, and the polynomial bundles.

#include <gtest/gtest.h>

#include "qvalab/structure.hpp"

using namespace qvalab;

namespace {

Rat rc(const MSeries& f, int h, long e0) {
    auto q = f.coeff(h, {e0, 0, 0});
    EXPECT_TRUE(q.exact) << "not exact at h=" << h << " e=" << e0;
    EXPECT_TRUE(q.value.is_rational());
    return q.value.rat();
}

// exp(([a]_{q^d} q^d - a) log x): the product of (1 + (|a|-2t) hbar/x) over t,
// inverted for negative a.
MSeries log_x_factor(const SCtx& ctx, int a) {
    MSeries p = MSeries::one(ctx);
    int m = a < 0 ? -a : a;
    for (int t = 0; t < m; ++t) {
        int c = m - 2 * t;
        if (c == 0) continue;
        p *= MSeries::one(ctx) + MSeries::monomial(ctx, Cyc(Rat(c)), 1, 0, -1);
    }
    return a >= 0 ? p : p.series_inverse();
}

// f(-x): exponents unchanged, odd coefficients negated.
MSeries flip_x(const MSeries& f) {
    MSeries r = f;
    for (auto& sl : r.s) {
        if (sl.zero_claim()) continue;
        for (auto& [k, c] : sl.t)
            if (decode_exps(k)[0] % 2 != 0) c = -c;
    }
    return r;
}

} // namespace

TEST(Structure, CMatrixRankOneOracle) {
    // c(x) = (e^{2x} - 1)/(2x): coefficient of x^n is 2^n/(n+1)!.
    auto d = build_root_datum(DKind::A, 1, MuSpec::identity);
    auto c = compute_C(d, 10);
    Rat fact(1);
    Rat pow2(1);
    for (int n = 0; n <= 10; ++n) {
        fact *= (n + 1);
        EXPECT_EQ(c[0][0][n], pow2 / fact) << n;
        pow2 *= 2;
    }
}

TEST(Structure, CMatrixSymmetries) {
    for (auto [k, r, m] : {std::tuple{DKind::A, 2, MuSpec::flip},
                           {DKind::A, 3, MuSpec::flip},
                           {DKind::D, 4, MuSpec::triality},
                           {DKind::A, 3, MuSpec::identity}}) {
        auto d = build_root_datum(k, r, m);
        auto c = compute_C(d, 8);
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j) {
                EXPECT_EQ(c[i][j][0], Rat(i == j ? 1 : 0));
                EXPECT_EQ(c[i][j], c[j][i]);
                EXPECT_EQ(c[d.mu[i]][d.mu[j]], c[i][j]);
            }
    }
}

TEST(Structure, VarthetaOracle) {
    SCtx ctx(1, 4, 10);
    MSeries th0 = compute_vartheta(ctx, 0);
    // log(sinh(x/2)/(x/2)) = x^2/24 - x^4/2880 + x^6/181440 - ...
    EXPECT_EQ(rc(th0, 0, 0), 0);
    EXPECT_EQ(rc(th0, 0, 1), 0);
    EXPECT_EQ(rc(th0, 0, 2), Rat(1, 24));
    EXPECT_EQ(rc(th0, 0, 3), 0);
    EXPECT_EQ(rc(th0, 0, 4), Rat(-1, 2880));
    EXPECT_EQ(rc(th0, 0, 6), Rat(1, 181440));
}

TEST(Structure, VarthetaTwistedValueAndSymmetry) {
    for (int N : {2, 3}) {
        SCtx ctx(N, 4, 10);
        for (int k = 1; k < N; ++k) {
            MSeries a = compute_vartheta(ctx, k);
            // theta_k(0) = 0.
            auto c0 = a.coeff(0, {0, 0, 0});
            ASSERT_TRUE(c0.exact);
            EXPECT_TRUE(c0.value.is_zero());
            // theta_k(x) = theta_{-k}(-x).
            MSeries b = flip_x(compute_vartheta(ctx, N - k));
            auto cmp = dist_equal(a, b, 8, ctx.H);
            EXPECT_EQ(cmp.failed, 0) << "N=" << N << " k=" << k << " " << cmp.first_mismatch;
            EXPECT_GT(cmp.passed, 0);
        }
    }
}

TEST(Structure, VarthetaDerivative) {
    // d/dx theta_k(x) = (1/2)(xi^k e^x + 1)/(xi^k e^x - 1) - delta_{k,0}/x.
    for (auto [N, k] : {std::pair{1, 0}, {2, 1}, {3, 1}, {3, 2}}) {
        SCtx ctx(N, 4, 10);
        auto d = build_root_datum(N == 1 ? DKind::A : (N == 2 ? DKind::A : DKind::D),
                                  N == 1 ? 1 : (N == 2 ? 2 : 4),
                                  N == 1 ? MuSpec::identity
                                         : (N == 2 ? MuSpec::flip : MuSpec::triality));
        StructureTables st(d, ctx);
        MSeries lhs = st.vartheta[k].deriv(0);
        MSeries rhs = st.w_series(k).scaled(Cyc(Rat(1, 2)));
        if (k == 0) rhs -= MSeries::monomial(ctx, Cyc(1), 0, 0, -1);
        auto cmp = dist_equal(lhs, rhs, 8, ctx.H);
        EXPECT_EQ(cmp.failed, 0) << "N=" << N << " k=" << k << " " << cmp.first_mismatch;
        EXPECT_GT(cmp.passed, 0);
    }
}

TEST(Structure, KappaRankOneAtZeroOracle) {
    // kappa(0) = sinh(hbar)/hbar = sum hbar^{2n}/(2n+1)!.
    SCtx ctx(1, 8, 10);
    StructureTables st(build_root_datum(DKind::A, 1, MuSpec::identity), ctx);
    MSeries k0 = StructureTables::at_zero(st.kappa(0, 0));
    Rat f(1);
    for (int h = 0; h < ctx.H; ++h) {
        if (h > 0) f /= h;
        auto c = k0.coeff(h, {0, 0, 0});
        ASSERT_TRUE(c.exact) << h;
        EXPECT_EQ(c.value, Cyc(h % 2 == 0 ? f * Rat(1, h + 1) : Rat(0))) << h;
    }
}

TEST(Structure, EtaKeyLemma) {
    // exp(<eta(alpha_i, x), alpha_j>) = kappa_{i,j}(x) * log-x factor.
    for (auto [k, r, m] : {std::tuple{DKind::A, 1, MuSpec::identity},
                           {DKind::A, 2, MuSpec::flip}}) {
        SCtx ctx(k == DKind::A && r == 1 ? 1 : 2, 5, 8);
        auto d = build_root_datum(k, r, m);
        StructureTables st(d, ctx);
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j) {
                MSeries lhs = st.eta_pair(i, j).series_exp();
                MSeries rhs = st.kappa(i, j) * log_x_factor(ctx, d.a(i, j));
                auto cmp = dist_equal(lhs, rhs, 6, ctx.H);
                EXPECT_EQ(cmp.failed, 0)
                    << "(" << i << "," << j << ") " << cmp.first_mismatch;
                EXPECT_GT(cmp.passed, 0);
            }
    }
}

TEST(Structure, IdentitySuite) {
    for (auto [k, r, m, N] : {std::tuple{DKind::A, 1, MuSpec::identity, 1},
                              {DKind::A, 2, MuSpec::identity, 1},
                              {DKind::A, 2, MuSpec::flip, 2},
                              {DKind::A, 3, MuSpec::flip, 2},
                              {DKind::D, 4, MuSpec::triality, 3}}) {
        SCtx ctx(N, 4, 8);
        StructureTables st(build_root_datum(k, r, m), ctx);
        auto res = verify_structure_identities(st, 6, ctx.H);
        for (const auto& ir : res) {
            EXPECT_TRUE(ir.ok) << ir.name << ": " << ir.detail;
            EXPECT_GT(ir.passed, 0) << ir.name;
        }
    }
}

TEST(Structure, PolynomialBundle) {
    for (auto [k, r, m, N] : {std::tuple{DKind::A, 2, MuSpec::flip, 2},
                              {DKind::A, 3, MuSpec::flip, 2},
                              {DKind::D, 4, MuSpec::triality, 3}}) {
        SCtx ctx(N, 3, 6);
        auto d = build_root_datum(k, r, m);
        StructureTables st(d, ctx);
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j)
                for (int sign : {+1, -1}) {
                    // G^pm = q^{pm abar} F^mp.
                    EXPECT_EQ(st.G_pm(i, j, sign),
                              st.F_pm(i, j, -sign)
                                  .scaled(QLaurent::qpow(sign * st.o.abar[i][j])));
                    // p^pm times its denominator equals the closed numerator.
                    int di = st.o.di[i], dij = st.o.dij[i][j], si = st.o.si[i];
                    BPoly den = BPoly::mono(di, 0, QLaurent::qpow(2 * sign * di)) -
                                BPoly::mono(0, di, QLaurent(Cyc(1)));
                    BPoly numq = BPoly::mono(dij, 0, QLaurent::qpow(2 * sign * dij)) -
                                 BPoly::mono(0, dij, QLaurent(Cyc(1)));
                    BPoly pre(QLaurent(Cyc(1)));
                    for (int t = 0; t < si - 1; ++t)
                        pre *= BPoly::mono(di, 0, QLaurent(Cyc(1))) +
                               BPoly::mono(0, di, QLaurent::qpow(-sign * di));
                    EXPECT_EQ(st.p_pm(i, j, sign) * den, pre * numq)
                        << i << "," << j << "," << sign;
                }
        // f-denominator: trivial off the orbit, degree d_i * (N_i occurrences)
        // on it.
        for (int i = 0; i < d.rank; ++i)
            for (int j = 0; j < d.rank; ++j) {
                bool on_orbit = false;
                for (int t = 0; t < d.N; ++t)
                    if (d.mu_pow(t, i) == j) on_orbit = true;
                BPoly fd = st.f_denominator(i, j);
                if (!on_orbit) EXPECT_EQ(fd, BPoly(QLaurent(Cyc(1))));
                else EXPECT_GT(fd.t.size(), 1u);
            }
    }
}

TEST(Structure, BSquaredClosedForm) {
    // B_i^2 = (s_i/d_i) [d_i/s_i]_q.
    for (auto [k, r, m, N] : {std::tuple{DKind::A, 1, MuSpec::identity, 1},
                              {DKind::A, 2, MuSpec::flip, 2},
                              {DKind::A, 3, MuSpec::flip, 2},
                              {DKind::D, 4, MuSpec::triality, 3}}) {
        SCtx ctx(N, 8, 8);
        auto d = build_root_datum(k, r, m);
        StructureTables st(d, ctx);
        for (int i = 0; i < d.rank; ++i) {
            Rat rat(st.o.di[i], st.o.si[i]);
            MSeries num = (qpow_series(ctx, rat) - qpow_series(ctx, -rat)).hbar_div();
            MSeries den = (qpow_series(ctx, Rat(1)) - qpow_series(ctx, Rat(-1))).hbar_div();
            MSeries rhs = num.scaled(Cyc(Rat(st.o.si[i], st.o.di[i]))) * den.series_inverse();
            auto cmp = dist_equal(st.B_sq(i), rhs, 1, ctx.H - 1);
            EXPECT_EQ(cmp.failed, 0) << "i=" << i << " " << cmp.first_mismatch;
            EXPECT_EQ(cmp.skipped, 0);
        }
    }
}

TEST(Structure, NegativeControls) {
    SCtx ctx(1, 4, 8);
    StructureTables st(build_root_datum(DKind::A, 1, MuSpec::identity), ctx);
    st.corrupt_kappa = true;
    auto res = verify_structure_identities(st, 6, ctx.H);
    bool kappa_failed = false;
    for (const auto& ir : res)
        if ((ir.name == "kappa-ratio" || ir.name == "kappa-shift") && !ir.ok)
            kappa_failed = true;
    EXPECT_TRUE(kappa_failed);

    StructureTables st2(build_root_datum(DKind::A, 1, MuSpec::identity), ctx);
    st2.corrupt_g = true;
    auto res2 = verify_structure_identities(st2, 6, ctx.H);
    bool g_failed = false;
    for (const auto& ir : res2)
        if ((ir.name == "g-unitarity" || ir.name == "g-cross" || ir.name == "kappa-ratio") &&
            !ir.ok)
            g_failed = true;
    EXPECT_TRUE(g_failed);
}
