/*
 * Copyright 2025 The qfa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qfa/constructions.hpp"

#include <random>
#include <set>

namespace qfa {

namespace {

int mod(long a, int p) {
    long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

// Polynomials are coefficient vectors, lowest degree first, with no trailing zeros.
using Poly = std::vector<int>;

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the monic polynomial m.
Poly poly_mod(Poly a, const Poly& m, int p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    while (a.size() > dm) {
        int lead = a.back();
        std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = mod(a[shift + i] - static_cast<long>(lead) * m[i], p);
        trim(a);
    }
    return a;
}

bool is_irreducible(const Poly& f, int p) {
    const int n = static_cast<int>(f.size()) - 1;
    for (int d = 1; 2 * d <= n; ++d) {
        std::uint64_t total = 1;
        for (int i = 0; i < d; ++i) total *= static_cast<std::uint64_t>(p);
        for (std::uint64_t code = 0; code < total; ++code) {
            Poly g(static_cast<std::size_t>(d) + 1, 0);
            std::uint64_t v = code;
            for (int i = 0; i < d; ++i) g[i] = static_cast<int>(v % static_cast<std::uint64_t>(p)), v /= static_cast<std::uint64_t>(p);
            g[d] = 1;
            if (poly_mod(f, g, p).empty()) return false;
        }
    }
    return true;
}

using Mat = std::vector<std::vector<int>>;

Mat mat_mul(const Mat& a, const Mat& b, int p) {
    const std::size_t n = a.size();
    Mat c(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] = (c[i][j] + a[i][k] * b[k][j]) % p;
        }
    return c;
}

void validate_full_rank(const std::vector<FpSymMatrix>& mats, int n, int p) {
    if (n <= kMaxFactorQ) {
        if (factor_rank(mats) != n) throw ValidationError("trace_sym_space: a combination lost rank");
        return;
    }
    std::mt19937_64 rng(0xF0F2);
    std::uniform_int_distribution<int> dist(0, p - 1);
    for (int trial = 0; trial < 200; ++trial) {
        FpSymMatrix S(p, n);
        bool nonzero = false;
        for (int k = 0; k < n; ++k) {
            int l = dist(rng);
            nonzero |= l != 0;
            S = S + mats[k].scaled(l);
        }
        if (nonzero && matrix_rank(S) != n) throw ValidationError("trace_sym_space: a sampled combination lost rank");
    }
}

GroupSubset coset(const GroupSpec& g, int i, const FpVector& t) {
    return GroupSubset(g, [&](std::uint64_t x) {
        for (int j = 0; j < i; ++j)
            if (g.digit(x, j) != t[j]) return false;
        return true;
    });
}

}  // namespace

GroupSubset gs(int n, int p) {
    GroupSpec g(p, n);
    return GroupSubset(g, [&](std::uint64_t x) {
        for (int j = 0; j < n; ++j) {
            int d = g.digit(x, j);
            if (d != 0) return d == 1;
        }
        return false;
    });
}

int first_nonzero(const FpVector& x) {
    for (int i = 0; i < x.size(); ++i)
        if (x[i] != 0) return i + 1;
    return x.size();
}

GSMetric gs_metric(const FpVector& x, const FpVector& y) {
    if (x.size() != y.size()) throw ShapeError("gs_metric: length mismatch");
    GSMetric m;
    while (m.lambda < x.size() && x[m.lambda] == y[m.lambda]) ++m.lambda;
    m.d = 1.0 / (m.lambda + 1);
    return m;
}

FpVector tau(int i, int alpha, const FpVector& a) {
    if (i < 1 || i > a.size()) throw RangeError("tau: index out of range");
    FpVector e(a.p(), a.size());
    e.set(i - 1, alpha);
    return e - a;
}

std::vector<int> least_irreducible(int n, int p) {
    if (n < 1 || !is_prime(p)) throw ValidationError("least_irreducible: bad parameters");
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(p);
    for (std::uint64_t code = 0; code < total; ++code) {
        Poly f(static_cast<std::size_t>(n) + 1, 0);
        std::uint64_t v = code;
        for (int i = 0; i < n; ++i) f[i] = static_cast<int>(v % static_cast<std::uint64_t>(p)), v /= static_cast<std::uint64_t>(p);
        f[n] = 1;
        if (is_irreducible(f, p)) return Poly(f.begin(), f.begin() + n);
    }
    throw ValidationError("least_irreducible: none found");
}

std::vector<FpSymMatrix> trace_sym_space(int n, int p) {
    auto c = least_irreducible(n, p);
    // Companion matrix of multiplication by t in the basis 1, t, ..., t^{n-1}.
    Mat T(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int j = 0; j + 1 < n; ++j) T[j + 1][j] = 1;
    for (int i = 0; i < n; ++i) T[i][n - 1] = mod(-c[i], p);
    std::vector<int> tr(static_cast<std::size_t>(3 * n), 0);
    Mat P(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) P[i][i] = 1;
    for (int m = 0; m < 3 * n; ++m) {
        int s = 0;
        for (int i = 0; i < n; ++i) s += P[i][i];
        tr[m] = s % p;
        P = mat_mul(P, T, p);
    }
    std::vector<FpSymMatrix> mats;
    for (int k = 0; k < n; ++k) {
        FpSymMatrix M(p, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M.set_sym(i, j, tr[i + j + k]);
        mats.push_back(M);
    }
    validate_full_rank(mats, n, p);
    return mats;
}

QgsResult qgs(int n, int p) {
    GroupSpec g(p, n);
    auto mats = trace_sym_space(n, p);
    std::vector<std::vector<std::uint8_t>> tables;
    for (const auto& M : mats) tables.push_back(quad_table(g, M));
    GroupSubset A(g, [&](std::uint64_t x) {
        for (const auto& t : tables)
            if (t[x] != 0) return t[x] == 1;
        return false;
    });
    return {A, QuadraticFactor(p, n, {}, mats)};
}

GroupSubset quadric(int n, int p, const FpSymMatrix& M, int c) {
    GroupSpec g(p, n);
    auto t = quad_table(g, M);
    const int cc = mod(c, p);
    return GroupSubset(g, [&](std::uint64_t x) { return t[x] == cc; });
}

GroupSubset standard_quadric(int n, int p, int c) { return quadric(n, p, FpSymMatrix::identity(p, n), c); }

GroupSubset sparse_example(int n, int p) {
    if (n < 2 || n % 2 != 0) throw ValidationError("sparse_example: n must be even and positive");
    GroupSpec g(p, n);
    GroupSubset A(g);
    const int h = n / 2;
    for (int i = 1; i <= h; ++i)
        for (int j = h + 1; j <= h + i; ++j) {
            FpVector v(p, n);
            v.set(i - 1, 1);
            v.set(j - 1, 1);
            A.insert(g.index_of(v));
        }
    return A;
}

GroupSubset union_of_cosets(const GroupSpec& g, const LinearFactor& H, const std::vector<FpVector>& reps) {
    QuadraticFactor B(g.p(), g.n(), H.vectors);
    auto t = label_table(g, B);
    std::set<std::uint32_t> keep;
    for (const auto& r : reps) keep.insert(static_cast<std::uint32_t>(t[g.index_of(r)]));
    return GroupSubset(g, [&](std::uint64_t x) { return keep.count(t[x]) > 0; });
}

GroupSubset union_of_atoms(const GroupSpec& g, const QuadraticFactor& B, const std::vector<AtomLabel>& labels) {
    auto t = label_table(g, B);
    std::set<std::uint64_t> keep;
    for (const auto& l : labels) keep.insert(label_code(l, B.p()));
    return GroupSubset(g, [&](std::uint64_t x) { return keep.count(t[x]) > 0; });
}

QuadraticFactor trace_factor(int n, int p, int ell, int q) {
    if (ell < 0 || ell > n || q < 0 || q > n) throw ValidationError("trace_factor: complexity out of range");
    std::vector<FpVector> lin;
    for (int i = 0; i < ell; ++i) lin.push_back(FpVector::basis(p, n, i));
    std::vector<FpSymMatrix> quad;
    if (q > 0) {
        auto mats = trace_sym_space(n, p);
        quad.assign(mats.begin(), mats.begin() + q);
    }
    return QuadraticFactor(p, n, lin, quad);
}

GsIntersectionCheck verify_gs_intersection(const FpVector& b, const FpVector& c, int n, int p) {
    if (b == c) throw ValidationError("verify_gs_intersection: b and c must differ");
    GroupSpec g(p, n);
    GroupSubset A = gs(n, p), notA = A.complement();
    const std::uint64_t bi = g.index_of(b), ci = g.index_of(c);
    GroupSubset Ab = A.translate_back(bi), Ac = A.translate_back(ci);
    GroupSubset Nb = notA.translate_back(bi), Nc = notA.translate_back(ci);

    GsIntersectionCheck r;
    r.m = gs_metric(b, c).lambda + 1;
    const int m = r.m;
    const int bm = b[m - 1], cm = c[m - 1];
    const int delta = mod(cm - bm, p);  // nonzero
    auto eq = [p](int a, int bb) { return mod(a - bb, p) == 0; };
    auto H = [&](int i, int alpha, const FpVector& a) { return coset(g, i, tau(i, alpha, a)); };
    auto Hbeta = [&](int i, const FpVector& a) {
        GroupSubset u(g);
        for (int beta = 2; beta < p; ++beta) u = u.unite(H(i, beta, a));
        return u;
    };
    auto point = [&](const FpVector& v) {
        GroupSubset s(g);
        s.insert(g.index_of(v));
        return s;
    };

    // Mixed intersection (A - b) cap (not A - c).
    {
        const bool c1 = eq(1 - bm, 2 - cm), c3 = eq(1 - bm, -cm);
        bool c2 = false;
        for (int beta = 3; beta < p; ++beta) c2 |= eq(1 - bm, beta - cm);
        r.mixed_fired = int(c1) + int(c2) + int(c3);
        GroupSubset rhs(g);
        if (c1) {
            r.mixed_case = 1;
            rhs = H(m, 1, b);
        } else if (c2) {
            r.mixed_case = 2;
            for (int i = m; i <= n; ++i) rhs = rhs.unite(H(i, 1, b));
        } else {
            r.mixed_case = 3;
            rhs = point(-c);
            for (int i = m + 1; i <= n; ++i) rhs = rhs.unite(H(i, 1, b)).unite(Hbeta(i, c));
        }
        r.mixed_holds = rhs == Ab.intersect(Nc);
    }
    // (A - b) cap (A - c).
    {
        const bool c1 = delta == p - 1, c2 = delta == 1;
        r.ones_fired = int(c1) + int(c2) + int(!c1 && !c2);
        r.ones_case = c1 ? 1 : (c2 ? 2 : 3);
        GroupSubset rhs(g);
        for (int i = 1; i < m; ++i) rhs = rhs.unite(H(i, 1, b));
        for (int i = m + 1; i <= n; ++i) {
            if (c1) rhs = rhs.unite(H(i, 1, c));
            if (c2) rhs = rhs.unite(H(i, 1, b));
        }
        r.ones_holds = rhs == Ab.intersect(Ac);
    }
    // (not A - b) cap (not A - c).
    {
        bool c4 = false, c5 = false;
        for (int beta = 2; beta < p; ++beta) {
            c4 |= eq(beta - bm, -cm);
            c5 |= eq(-bm, beta - cm);
        }
        const bool c6 = !c4 && !c5;
        r.zeros_fired = int(c4) + int(c5) + int(c6);
        r.zeros_case = c4 ? 4 : (c5 ? 5 : 6);
        GroupSubset rhs(g);
        for (int i = 1; i < m; ++i) rhs = rhs.unite(Hbeta(i, b));
        for (int i = m + 1; i <= n; ++i) {
            if (c4) rhs = rhs.unite(Hbeta(i, c));
            if (c5) rhs = rhs.unite(Hbeta(i, b));
        }
        for (int beta = 2; beta < p; ++beta) {
            int s = mod(beta - bm + cm, p);
            if (s != 0 && s != 1) rhs = rhs.unite(H(m, beta, b));
        }
        if (!A.contains(c - b)) rhs = rhs.unite(point(-b));
        if (!A.contains(b - c)) rhs = rhs.unite(point(-c));
        r.zeros_holds = rhs == Nb.intersect(Nc);
    }
    return r;
}

}  // namespace qfa
