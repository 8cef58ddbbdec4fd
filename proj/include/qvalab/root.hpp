/**
 * @file root.hpp
 * @brief Simply-laced root lattices, diagram automorphisms, the epsilon
 *        2-cocycle, and orbit combinatorics.
 *
 * Node numbering follows Bourbaki.  Lattice vectors are integer coordinate
 * vectors in the simple-root basis (0-based indices internally).
 */

#pragma once

#include <numeric>
#include <vector>

#include "scalar.hpp"

namespace qvalab {

using LVec = std::vector<long>;  // lattice vector in the simple-root basis

enum class DKind { A, D, E };
enum class MuSpec { identity, flip, triality };

struct RootDatum {
    DKind kind;
    int rank = 0;
    std::vector<std::vector<int>> cartan;   // a_{i,j}
    std::vector<int> mu;                    // diagram automorphism as permutation
    int N = 1;                              // order of mu
    std::vector<std::vector<Rat>> cartan_inv;

    int a(int i, int j) const { return cartan[i][j]; }
    int mu_pow(int k, int i) const {
        k %= N;
        if (k < 0) k += N;
        int r = i;
        for (int t = 0; t < k; ++t) r = mu[r];
        return r;
    }

    /// <alpha, beta> = alpha^T A beta.
    long pairing(const LVec& x, const LVec& y) const {
        long s = 0;
        for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j)
                s += x[i] * cartan[i][j] * y[j];
        return s;
    }

    /// mu acting on a lattice vector: coordinate j of mu(x) is x_{mu^{-1}(j)}.
    LVec mu_vec(const LVec& x, int k = 1) const {
        LVec r(rank, 0);
        for (int i = 0; i < rank; ++i) r[mu_pow(k, i)] += x[i];
        return r;
    }

    static LVec simple(int rank, int i) {
        LVec r(rank, 0);
        r[i] = 1;
        return r;
    }
};

namespace detail {

inline std::vector<std::vector<int>> build_cartan(DKind kind, int rank) {
    auto bad = [&] { throw config_error("invalid rank for diagram kind"); };
    std::vector<std::vector<int>> A(rank, std::vector<int>(rank, 0));
    for (int i = 0; i < rank; ++i) A[i][i] = 2;
    auto link = [&](int i, int j) { A[i][j] = A[j][i] = -1; };
    switch (kind) {
        case DKind::A:
            if (rank < 1) bad();
            for (int i = 0; i + 1 < rank; ++i) link(i, i + 1);
            break;
        case DKind::D:
            if (rank < 4) bad();
            for (int i = 0; i + 1 < rank - 1; ++i) link(i, i + 1);
            link(rank - 3, rank - 1);
            break;
        case DKind::E:
            if (rank < 6 || rank > 8) bad();
            // Bourbaki: node 2 hangs off node 4; 1-3-4-5-...-rank chain.
            link(0, 2);
            link(1, 3);
            for (int i = 2; i + 1 < rank; ++i) link(i, i + 1);
            break;
    }
    return A;
}

inline std::vector<int> build_mu(DKind kind, int rank, MuSpec spec) {
    std::vector<int> mu(rank);
    std::iota(mu.begin(), mu.end(), 0);
    switch (spec) {
        case MuSpec::identity:
            break;
        case MuSpec::flip:
            if (kind == DKind::A) {
                for (int i = 0; i < rank; ++i) mu[i] = rank - 1 - i;
            } else if (kind == DKind::D) {
                std::swap(mu[rank - 2], mu[rank - 1]);
            } else if (kind == DKind::E && rank == 6) {
                mu[0] = 5; mu[5] = 0; mu[2] = 4; mu[4] = 2;
            } else {
                throw config_error("flip automorphism invalid for this diagram");
            }
            break;
        case MuSpec::triality:
            if (!(kind == DKind::D && rank == 4))
                throw config_error("triality requires D_4");
            // Outer nodes (Bourbaki 1, 3, 4) cycle; node 2 is central.
            mu[0] = 2; mu[2] = 3; mu[3] = 0;
            break;
    }
    return mu;
}

inline std::vector<std::vector<Rat>> invert_matrix(const std::vector<std::vector<int>>& A) {
    int n = static_cast<int>(A.size());
    std::vector<std::vector<Rat>> M(n, std::vector<Rat>(2 * n, Rat(0)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) M[i][j] = A[i][j];
        M[i][n + i] = 1;
    }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (M[r][col] != 0) { piv = r; break; }
        if (piv < 0) throw internal_error("singular Cartan matrix");
        std::swap(M[col], M[piv]);
        Rat d = M[col][col];
        for (int j = 0; j < 2 * n; ++j) M[col][j] /= d;
        for (int r = 0; r < n; ++r) {
            if (r == col || M[r][col] == 0) continue;
            Rat f = M[r][col];
            for (int j = 0; j < 2 * n; ++j) M[r][j] -= f * M[col][j];
        }
    }
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv[i][j] = M[i][n + j];
    return inv;
}

} // namespace detail

inline RootDatum build_root_datum(DKind kind, int rank, MuSpec spec) {
    RootDatum d;
    d.kind = kind;
    d.rank = rank;
    d.cartan = detail::build_cartan(kind, rank);
    d.mu = detail::build_mu(kind, rank, spec);
    // Order of mu.
    d.N = 1;
    {
        std::vector<int> p = d.mu;
        std::vector<int> idp(rank);
        std::iota(idp.begin(), idp.end(), 0);
        while (p != idp) {
            for (int i = 0; i < rank; ++i) p[i] = d.mu[p[i]];
            ++d.N;
            if (d.N > rank + 1) throw internal_error("automorphism order runaway");
        }
    }
    // Verify the automorphism property.
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j)
            if (d.cartan[d.mu[i]][d.mu[j]] != d.cartan[i][j])
                throw config_error("mu is not a diagram automorphism");
    d.cartan_inv = detail::invert_matrix(d.cartan);
    return d;
}

/// Bilinear 2-cocycle on the lattice, fixed on generators by
/// epsilon(alpha_i, alpha_j) = (-1)^{a_{i,j}} for i > j and 1 otherwise,
/// extended bimultiplicatively.  The table is mutable to support deliberate
/// corruption in negative-control checks.
struct EpsilonCocycle {
    std::vector<std::vector<int>> table;  // +-1 on generator pairs

    explicit EpsilonCocycle(const RootDatum& d) {
        int n = d.rank;
        table.assign(n, std::vector<int>(n, 1));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j)
                table[i][j] = (d.cartan[i][j] % 2 == 0) ? 1 : -1;
    }

    int operator()(const LVec& x, const LVec& y) const {
        long e = 0;
        int n = static_cast<int>(table.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (table[i][j] < 0 && ((x[i] * y[j]) % 2 != 0)) ++e;
        return (e % 2 == 0) ? 1 : -1;
    }
};

struct OrbitData {
    std::vector<int> Ni;             // orbit sizes
    std::vector<int> di;             // N / N_i
    std::vector<int> si;             // 1 or 2
    std::vector<std::vector<int>> dij;
    std::vector<std::vector<int>> abar;
    std::vector<std::vector<Cyc>> C;
};

inline OrbitData orbit_data(const RootDatum& d) {
    OrbitData o;
    int n = d.rank;
    o.Ni.resize(n);
    o.di.resize(n);
    o.si.resize(n);
    o.dij.assign(n, std::vector<int>(n, 0));
    o.abar.assign(n, std::vector<int>(n, 0));
    o.C.assign(n, std::vector<Cyc>(n, Cyc(1)));
    for (int i = 0; i < n; ++i) {
        int sz = 1, cur = d.mu[i];
        while (cur != i) { cur = d.mu[cur]; ++sz; }
        o.Ni[i] = sz;
        o.di[i] = d.N / sz;
        o.si[i] = (sz % 2 == 0 && d.a(d.mu_pow(sz / 2, i), i) == -1) ? 2 : 1;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Cyc c(1);
            for (int k = 0; k < d.N; ++k) {
                int akk = d.a(d.mu_pow(k, i), j);
                o.abar[i][j] += akk;
                if (akk != 0) ++o.dij[i][j];
                if (akk == -1) c *= -xi_pow(d.N, -k);
            }
            o.C[i][j] = c;
        }
    return o;
}

/// Advisory evenness check: sum_k <mu^k alpha_i, alpha_i> in 2Z for all i.
inline bool check_mu_evenness(const RootDatum& d) {
    for (int i = 0; i < d.rank; ++i) {
        long s = 0;
        for (int k = 0; k < d.N; ++k) s += d.a(d.mu_pow(k, i), i);
        if (s % 2 != 0) return false;
    }
    return true;
}

} // namespace qvalab
