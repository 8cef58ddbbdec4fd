// Exact polynomial layer: q-Laurent arithmetic, rational expressions with
// cross-multiplied equality, and the expansion maps into the series layer.

#include <gtest/gtest.h>

#include "qvalab/qpoly.hpp"

using namespace qvalab;

namespace {

Rat rc(const MSeries& f, int h, long e0, long e1 = 0) {
    auto q = f.coeff(h, {e0, e1, 0});
    EXPECT_TRUE(q.exact) << "not exact at h=" << h << " e=(" << e0 << "," << e1 << ")";
    EXPECT_TRUE(q.value.is_rational());
    return q.value.rat();
}

// The basic exchange function with a single factor: (q^2 - u)/(1 - q^2 u).
RatExpr a1_gtilde() {
    UPoly num = UPoly(QLaurent::qpow(2)) - UPoly::upow(1, QLaurent(Cyc(1)));
    UPoly den = UPoly(QLaurent(Cyc(1))) - UPoly::upow(1, QLaurent::qpow(2));
    return RatExpr(num, den);
}

} // namespace

TEST(QPoly, QLaurentRing) {
    QLaurent a = QLaurent::qpow(2) + QLaurent::qpow(-1, Cyc(Rat(1, 2)));
    QLaurent b = QLaurent::qpow(1) - QLaurent(Cyc(3));
    EXPECT_EQ(a * b, b * a);
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_EQ((a * b).t.size(), 4u);
    EXPECT_EQ(QLaurent::qpow(5).monomial_inverse(), QLaurent::qpow(-5));
    EXPECT_THROW(a.monomial_inverse(), internal_error);
    EXPECT_EQ(a.at_q1(), Cyc(Rat(3, 2)));
}

TEST(QPoly, QLaurentToSeries) {
    SCtx c(1, 5, 6);
    // q^2 * q^-3 = q^-1 as series.
    MSeries lhs = QLaurent::qpow(2).to_series(c) * QLaurent::qpow(-3).to_series(c);
    MSeries rhs = QLaurent::qpow(-1).to_series(c);
    auto cmp = dist_equal(lhs, rhs, 1, c.H);
    EXPECT_EQ(cmp.failed, 0);
    EXPECT_EQ(cmp.skipped, 0);
    Rat p(1);
    for (int h = 0; h < c.H; ++h) {
        EXPECT_EQ(rc(rhs, h, 0), p);
        p = p * (-1) / (h + 1);
    }
}

TEST(QPoly, UTaylorGeometric) {
    UPoly one(QLaurent(Cyc(1)));
    UPoly den = one - UPoly::upow(1, QLaurent(Cyc(1)));
    auto s = u_taylor(one, den, 8);
    for (long n = 0; n <= 8; ++n) EXPECT_EQ(s[n], QLaurent(Cyc(1))) << n;
}

TEST(QPoly, UTaylorExchangeOracle) {
    // (q^2 - u)/(1 - q^2 u) = q^2 + sum_{n>=1} (q^{2n+2} - q^{2n-2}) u^n.
    auto s = u_taylor(a1_gtilde().num, a1_gtilde().den, 6);
    EXPECT_EQ(s[0], QLaurent::qpow(2));
    for (long n = 1; n <= 6; ++n)
        EXPECT_EQ(s[n], QLaurent::qpow(2 * n + 2) - QLaurent::qpow(2 * n - 2)) << n;
}

TEST(QPoly, RatExprCrossMultiplication) {
    RatExpr g = a1_gtilde();
    // g(u) g(1/u) = 1 exactly.
    EXPECT_TRUE((g * g.flip_u()).is_one());
    // g(0) = q^2.
    EXPECT_EQ(g.at_zero_times_inverse_den(), QLaurent::qpow(2));
    // And a deliberately different rational is not equal.
    RatExpr h(UPoly(QLaurent::qpow(2)), UPoly(QLaurent(Cyc(1))));
    EXPECT_NE(g, h);
    EXPECT_EQ(g, g);
}

TEST(QPoly, IotaDifferenceIsDelta) {
    SCtx c(1, 3, 10);
    UPoly one(QLaurent(Cyc(1)));
    RatExpr r(one, one - UPoly::upow(1, QLaurent(Cyc(1))));  // 1/(1-u)
    long T = 9;
    MSeries d = iota_12(r, c, T) - iota_21(r, c, T);
    MSeries dw = delta_window(c, 0, 8, 0, 1);
    auto cmp = dist_equal(d, dw, 7);
    EXPECT_EQ(cmp.failed, 0) << cmp.first_mismatch;
    EXPECT_EQ(cmp.skipped, 0);
    EXPECT_GT(cmp.passed, 0);
}

TEST(QPoly, IotaWindowsAreSound) {
    SCtx c(1, 3, 10);
    UPoly one(QLaurent(Cyc(1)));
    RatExpr r(one, one - UPoly::upow(1, QLaurent(Cyc(1))));
    MSeries e12 = iota_12(r, c, 5);
    // Claimed-exact region stops at u-degree 5; beyond must be unclaimed.
    EXPECT_TRUE(e12.coeff(0, {-3, 3, 0}).exact);
    EXPECT_EQ(rc(e12, 0, -3, 3), 1);
    EXPECT_FALSE(e12.coeff(0, {-6, 6, 0}).exact);
    // Off-diagonal zero inside the window is exact.
    EXPECT_TRUE(e12.coeff(0, {-2, 3, 0}).exact);
    EXPECT_EQ(rc(e12, 0, -2, 3), 0);
    // Below the lowest u-degree everything is exactly zero.
    EXPECT_TRUE(e12.coeff(0, {4, -1, 0}).exact);
    EXPECT_EQ(rc(e12, 0, 4, -1), 0);
}

TEST(QPoly, SubstExpLaurentOracle) {
    // 1/(1 - e^x) = -1/x + 1/2 - x/12 + x^3/720 + O(x^5)
    // (negated Bernoulli expansion of 1/(e^x - 1)).
    SCtx c(1, 3, 8);
    UPoly one(QLaurent(Cyc(1)));
    RatExpr r(one, one - UPoly::upow(1, QLaurent(Cyc(1))));
    MSeries s = subst_exp(r, c, 0);
    EXPECT_EQ(rc(s, 0, -1), -1);
    EXPECT_EQ(rc(s, 0, 0), Rat(1, 2));
    EXPECT_EQ(rc(s, 0, 1), Rat(-1, 12));
    EXPECT_EQ(rc(s, 0, 2), 0);
    EXPECT_EQ(rc(s, 0, 3), Rat(1, 720));
}

TEST(QPoly, SubstExpTwisted) {
    // 1/(1 - xi e^x) at x=0 is the finite value 1/(1-xi): no pole.
    SCtx c(3, 3, 8);
    UPoly one(QLaurent(Cyc(1)));
    RatExpr r(one, one - UPoly::upow(1, QLaurent(Cyc(1))));
    MSeries s = subst_exp(r, c, 1);
    auto q0 = s.coeff(0, {0, 0, 0});
    ASSERT_TRUE(q0.exact);
    Cyc xi = primitive_root(3);
    EXPECT_EQ(q0.value, (Cyc(1) - xi).inverse());
    auto qm1 = s.coeff(0, {-1, 0, 0});
    ASSERT_TRUE(qm1.exact);
    EXPECT_TRUE(qm1.value.is_zero());
}

TEST(QPoly, BPolyAndHomogenize) {
    // Cross-multiplied form of g(x2/x1) = G/F with G = q^2 x1 - x2,
    // F = x1 - q^2 x2 (the single-factor case).
    RatExpr g = a1_gtilde();
    BPoly F = BPoly::mono(1, 0, QLaurent(Cyc(1))) - BPoly::mono(0, 1, QLaurent::qpow(2));
    BPoly G = BPoly::mono(1, 0, QLaurent::qpow(2)) - BPoly::mono(0, 1, QLaurent(Cyc(1)));
    // num(x2/x1) * x1 = G and den(x2/x1) * x1 = F.
    EXPECT_EQ(homogenize(g.num, 1), G);
    EXPECT_EQ(homogenize(g.den, 1), F);
    // G+ = q^{abar} F- with F- = x1 - q^{-2} x2 here.
    BPoly Fm = BPoly::mono(1, 0, QLaurent(Cyc(1))) - BPoly::mono(0, 1, QLaurent::qpow(-2));
    EXPECT_EQ(G, Fm.scaled(QLaurent::qpow(2)));
    // Series evaluation agrees with direct construction.
    SCtx c(1, 4, 6);
    MSeries Fs = F.to_series(c);
    MSeries direct = MSeries::monomial(c, Cyc(1), 0, 0, 1) -
                     MSeries::monomial(c, Cyc(1), 0, 1, 1) * QLaurent::qpow(2).to_series(c);
    auto cmp = dist_equal(Fs, direct, 4, c.H);
    EXPECT_EQ(cmp.failed, 0);
    EXPECT_EQ(cmp.skipped, 0);
}
