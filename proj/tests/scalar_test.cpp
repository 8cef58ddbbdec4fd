// Exact-scalar layer: big rationals and the small cyclotomic fields Q(xi_N),
// N in {1,2,3}.  The inverse in Q(xi_3) is cross-checked against an
// independently computed extended-Euclid inverse mod x^2 + x + 1.

#include <gtest/gtest.h>

#include <random>

#include "qvalab/scalar.hpp"

using namespace qvalab;

TEST(Rational, CanonicalForm) {
    Rat r(6, 4);
    r.canonicalize();
    EXPECT_EQ(r.get_num(), 3);
    EXPECT_EQ(r.get_den(), 2);
    Rat s = rat_from_string("-10/15");
    EXPECT_EQ(s.get_num(), -2);
    EXPECT_EQ(s.get_den(), 3);
    EXPECT_EQ(rat_to_string(s), "-2/3");
    EXPECT_THROW(rat_from_string("abc"), config_error);
}

TEST(Cyclotomic, PrimitiveRootOrders) {
    EXPECT_EQ(primitive_root(1), Cyc(1));
    EXPECT_EQ(primitive_root(2).pow(2), Cyc(1));
    EXPECT_NE(primitive_root(2), Cyc(1));
    Cyc xi = primitive_root(3);
    EXPECT_EQ(xi.pow(3), Cyc(1));
    EXPECT_NE(xi, Cyc(1));
    EXPECT_NE(xi.pow(2), Cyc(1));
    // 1 + xi + xi^2 = 0.
    EXPECT_TRUE((Cyc(1) + xi + xi.pow(2)).is_zero());
    EXPECT_THROW(primitive_root(4), config_error);
}

TEST(Cyclotomic, XiPowWrapsModN) {
    Cyc xi = primitive_root(3);
    EXPECT_EQ(xi_pow(3, 5), xi.pow(2));
    EXPECT_EQ(xi_pow(3, -1), xi.pow(2));
    EXPECT_EQ(xi_pow(3, 0), Cyc(1));
    EXPECT_EQ(xi_pow(2, 7), primitive_root(2));
}

// Independent oracle: inverse of a0 + a1*x in Q[x]/(x^2+x+1) via extended
// Euclid run by hand on polynomials of degree <= 1.
static Cyc euclid_inverse(const Rat& a0, const Rat& a1) {
    if (a1 == 0) return Cyc(3, 1 / a0, 0);
    // Divide x^2 + x + 1 by a1*x + a0:
    //   x^2 + x + 1 = (a1 x + a0)(x/a1 + (a1 - a0)/a1^2) + r,
    //   r = 1 - a0(a1 - a0)/a1^2.
    Rat r = 1 - a0 * (a1 - a0) / (a1 * a1);
    if (r == 0) throw std::runtime_error("unexpected zero remainder");
    // 1 = (1/r)(x^2+x+1) - (1/r)(x/a1 + (a1-a0)/a1^2)(a1 x + a0)
    // so inverse = -(1/r)(x/a1 + (a1-a0)/a1^2) mod x^2+x+1.
    Rat inv1 = -(1 / r) / a1;
    Rat inv0 = -(1 / r) * (a1 - a0) / (a1 * a1);
    return Cyc(3, inv0, inv1);
}

TEST(Cyclotomic, InverseMatchesExtendedEuclidOracle) {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<int> d(-9, 9);
    int tried = 0;
    while (tried < 200) {
        Rat a0(d(rng), 1 + std::abs(d(rng)));
        Rat a1(d(rng), 1 + std::abs(d(rng)));
        a0.canonicalize();
        a1.canonicalize();
        Cyc z(3, a0, a1);
        if (z.is_zero()) continue;
        ++tried;
        Cyc inv = z.inverse();
        EXPECT_EQ(inv, euclid_inverse(a0, a1)) << z.to_string();
        EXPECT_EQ(z * inv, Cyc(1) * xi_pow(3, 0));
        EXPECT_TRUE((z * inv - Cyc(1)).is_zero());
    }
}

TEST(Cyclotomic, FieldAxiomsRandomized) {
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> d(-6, 6);
    auto rnd = [&] {
        Rat a0(d(rng), 1 + std::abs(d(rng)));
        Rat a1(d(rng), 1 + std::abs(d(rng)));
        a0.canonicalize();
        a1.canonicalize();
        return Cyc(3, a0, a1);
    };
    for (int i = 0; i < 100; ++i) {
        Cyc x = rnd(), y = rnd(), z = rnd();
        EXPECT_EQ(x + y, y + x);
        EXPECT_EQ(x * y, y * x);
        EXPECT_EQ((x + y) + z, x + (y + z));
        EXPECT_EQ((x * y) * z, x * (y * z));
        EXPECT_EQ(x * (y + z), x * y + x * z);
        EXPECT_TRUE((x - x).is_zero());
        if (!x.is_zero()) EXPECT_TRUE((x / x - Cyc(1)).is_zero());
    }
}

TEST(Cyclotomic, ConjugationIsFieldAutomorphism) {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> d(-5, 5);
    auto rnd = [&] { return Cyc(3, Rat(d(rng)), Rat(d(rng))); };
    Cyc xi = primitive_root(3);
    EXPECT_EQ(xi.conj(), xi.pow(2));
    for (int i = 0; i < 50; ++i) {
        Cyc x = rnd(), y = rnd();
        EXPECT_EQ((x + y).conj(), x.conj() + y.conj());
        EXPECT_EQ((x * y).conj(), x.conj() * y.conj());
        EXPECT_EQ(x.conj().conj(), x);
    }
}

TEST(Cyclotomic, RationalPromotionAndOrderClash) {
    Cyc xi = primitive_root(3);
    Cyc half(Rat(1, 2));
    Cyc s = half + xi;            // order 1 promotes into order 3
    EXPECT_EQ(s.order(), 3);
    EXPECT_EQ(s - xi, half + xi * Cyc(0));
    Cyc m1 = primitive_root(2);   // value -1, rational
    EXPECT_EQ((m1 * xi), -xi);    // order 2 promotes too
    // Two genuinely irrational order mixes cannot happen with N<=3; the guard
    // is exercised via the declared-order check in the constructor instead.
    EXPECT_THROW(Cyc(2, Rat(1), Rat(1)), internal_error);
}

TEST(Cyclotomic, PowerAndDivisionIdentities) {
    Cyc xi = primitive_root(3);
    EXPECT_EQ(xi.pow(-1), xi.pow(2));
    EXPECT_EQ(xi.pow(-4), xi.pow(2));
    Cyc z(3, Rat(2, 3), Rat(-1, 5));
    EXPECT_EQ(z.pow(3) / z, z * z);
    EXPECT_EQ((z / z.pow(2)) * z, Cyc(1) + xi * Cyc(0));
}
