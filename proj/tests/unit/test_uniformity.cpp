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


#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qfa/constructions.hpp"
#include "qfa/uniformity.hpp"

using namespace qfa;

namespace {

std::vector<Complex> random_function(std::mt19937_64& rng, std::uint64_t N) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Complex> f(N);
    for (auto& z : f) z = Complex(u(rng), u(rng));
    return f;
}

// ||f||_{U2}^4 from the definition E_{x,a,b} f(x) conj f(x+a) conj f(x+b) f(x+a+b).
double u2_fourth_direct(const GroupSpec& g, const std::vector<Complex>& f) {
    const auto N = g.order();
    Complex s = 0;
    for (std::uint64_t x = 0; x < N; ++x)
        for (std::uint64_t a = 0; a < N; ++a)
            for (std::uint64_t b = 0; b < N; ++b)
                s += f[x] * std::conj(f[g.add(x, a)]) * std::conj(f[g.add(x, b)]) * f[g.add(g.add(x, a), b)];
    return s.real() / double(N * N * N);
}

// ||f||_{U3}^8 from the 8-fold definition.
double u3_eighth_direct(const GroupSpec& g, const std::vector<Complex>& f) {
    const auto N = g.order();
    Complex s = 0;
    for (std::uint64_t x = 0; x < N; ++x)
        for (std::uint64_t a = 0; a < N; ++a)
            for (std::uint64_t b = 0; b < N; ++b)
                for (std::uint64_t c = 0; c < N; ++c) {
                    Complex prod = 1;
                    for (int e = 0; e < 8; ++e) {
                        std::uint64_t y = x;
                        if (e & 1) y = g.add(y, a);
                        if (e & 2) y = g.add(y, b);
                        if (e & 4) y = g.add(y, c);
                        prod *= __builtin_popcount(e) % 2 ? std::conj(f[y]) : f[y];
                    }
                    s += prod;
                }
    return s.real() / double(N * N * N * N);
}

BipartiteGraph random_graph(std::mt19937_64& rng, std::size_t nu, std::size_t nv, int percent) {
    BipartiteGraph G;
    G.nu = nu;
    G.nv = nv;
    G.adj.resize(nu * nv);
    for (auto& e : G.adj) e = static_cast<int>(rng() % 100) < percent;
    if (G.edges() == 0) G.adj[0] = 1;
    return G;
}

double naive_dev2(const BipartiteGraph& G) {
    const double d = double(G.edges()) / double(G.nu * G.nv);
    double s = 0;
    for (std::size_t u0 = 0; u0 < G.nu; ++u0)
        for (std::size_t u1 = 0; u1 < G.nu; ++u1)
            for (std::size_t v0 = 0; v0 < G.nv; ++v0)
                for (std::size_t v1 = 0; v1 < G.nv; ++v1)
                    s += (G.edge(u0, v0) - d) * (G.edge(u0, v1) - d) * (G.edge(u1, v0) - d) * (G.edge(u1, v1) - d);
    return s / double(G.nu * G.nu * G.nv * G.nv);
}

}  // namespace

TEST_CASE("U2 norm, Fourier L4 and the direct definition agree") {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 3; ++n) {
        GroupSpec g(3, n);
        auto f = random_function(rng, g.order());
        const double direct = u2_fourth_direct(g, f);
        CHECK(std::pow(u2_norm(g, f), 4) == doctest::Approx(direct).epsilon(1e-9));
        CHECK(fourier_l4(g, f) == doctest::Approx(direct).epsilon(1e-9));
        auto fh = dft(g, f);
        double mx = 0;
        for (std::uint64_t t = 0; t < g.order(); ++t) mx = std::max(mx, std::abs(fh[t]));
        CHECK(fourier_linf(g, f) == doctest::Approx(mx));
    }
    auto A = gs(4, 3);
    auto f = to_complex(balanced(A));
    CHECK(fourier_l4(A.spec(), f) == doctest::Approx(std::pow(u2_norm(A.spec(), f), 4)).epsilon(1e-9));
}

TEST_CASE("U3 norm against the 8-fold definition") {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 2; ++n) {
        GroupSpec g(3, n);
        auto f = random_function(rng, g.order());
        CHECK(std::pow(u3_norm(g, f), 8) == doctest::Approx(u3_eighth_direct(g, f)).epsilon(1e-9));
        std::array<std::vector<Complex>, 8> fs;
        fs.fill(f);
        CHECK(std::abs(gowers_inner(g, fs) - Complex(u3_eighth_direct(g, f), 0)) < 1e-9);
    }
}

TEST_CASE("quadratic phases have U3 norm 1") {
    for (int n = 1; n <= 3; ++n) {
        GroupSpec g(3, n);
        std::vector<Complex> f(g.order());
        for (std::uint64_t x = 0; x < g.order(); ++x) {
            auto v = oracle::vec(x, 3, n);
            f[x] = oracle::omega(3, oracle::dot(v, v, 3));
        }
        CHECK(u3_norm(g, f) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sigma of binary and ternary descriptors") {
    TriadDescriptor bin{{AtomLabel{{1}, {2}}, AtomLabel{{2}, {2}}}, {{1}}};
    CHECK(sigma(bin, 3) == AtomLabel{{0}, {(2 + 2 + 2 * 1) % 3}});
    TriadDescriptor ter{{AtomLabel{{1}, {1}}, AtomLabel{{1}, {0}}, AtomLabel{{2}, {2}}}, {{1}, {2}, {0}}};
    CHECK(sigma(ter, 3) == AtomLabel{{(1 + 1 + 2) % 3}, {(1 + 0 + 2 + 2 * (1 + 2 + 0)) % 3}});
}

TEST_CASE("beta graphs follow the bilinear condition") {
    GroupSpec g(3, 3);
    auto B = trace_factor(3, 3, 0, 1);
    const auto& M = B.quadratic()[0];
    oracle::Mat m(3, std::vector<int>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = M.at(i, j);
    std::vector<std::uint64_t> X, Y;
    for (std::uint64_t x = 0; x < 27; ++x) (x % 2 ? X : Y).push_back(x);
    for (int b = 0; b < 3; ++b) {
        auto G = beta_graph(g, B, {b}, X, Y);
        for (std::size_t u = 0; u < X.size(); ++u)
            for (std::size_t v = 0; v < Y.size(); ++v)
                CHECK(G.edge(u, v) == (oracle::bilin(m, oracle::vec(X[u], 3, 3), oracle::vec(Y[v], 3, 3), 3) == b));
    }
}

TEST_CASE("dev2 and octahedron contractions match naive sums") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 15; ++t) {
        auto G = random_graph(rng, 1 + rng() % 15, 1 + rng() % 15, 10 + 6 * t);
        auto r = dev2_measure(G);
        CHECK(r.eps == doctest::Approx(naive_dev2(G)).epsilon(1e-9));
        CHECK(r.d2 == doctest::Approx(double(G.edges()) / double(G.nu * G.nv)));
    }
    for (int t = 0; t < 6; ++t) {
        Tensor3 T;
        T.nu = 1 + rng() % 5, T.nv = 1 + rng() % 5, T.nw = 1 + rng() % 5;
        std::uniform_real_distribution<double> u(-1, 1);
        for (std::size_t i = 0; i < T.nu * T.nv * T.nw; ++i) T.f.push_back(u(rng));
        double s = 0;
        for (std::size_t u0 = 0; u0 < T.nu; ++u0)
            for (std::size_t u1 = 0; u1 < T.nu; ++u1)
                for (std::size_t v0 = 0; v0 < T.nv; ++v0)
                    for (std::size_t v1 = 0; v1 < T.nv; ++v1)
                        for (std::size_t w0 = 0; w0 < T.nw; ++w0)
                            for (std::size_t w1 = 0; w1 < T.nw; ++w1) {
                                double prod = 1;
                                for (int e = 0; e < 8; ++e)
                                    prod *= T.at(e & 1 ? u1 : u0, e & 2 ? v1 : v0, e & 4 ? w1 : w0);
                                s += prod;
                            }
        CHECK(oct_sum(T) == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("triad sums land in B(sigma)") {
    GroupSpec g(3, 5);
    auto B = trace_factor(5, 3, 0, 1);
    for (int b1 = 0; b1 < 3; ++b1)
        for (int b2 = 0; b2 < 3; ++b2)
            for (int b12 = 0; b12 < 3; ++b12) {
                TriadDescriptor d{{AtomLabel{{}, {b1}}, AtomLabel{{}, {b2}}}, {{b12}}};
                CHECK(check_triad_membership(g, B, d) > 0);
            }
}

TEST_CASE("edge density over two cosets equals the density on their sum") {
    GroupSpec g(3, 4);
    std::mt19937_64 rng(4);
    GroupSubset A(g);
    for (std::uint64_t x = 0; x < g.order(); ++x)
        if (rng() % 2) A.insert(x);
    QuadraticFactor L(3, 4, {FpVector(3, {1, 0, 2, 0}), FpVector(3, {0, 1, 1, 1})});
    for (std::uint64_t c1 = 0; c1 < 9; ++c1)
        for (std::uint64_t c2 = 0; c2 < 9; c2 += 4) {
            TriadDescriptor d{{label_of_code(c1, 2, 0, 3), label_of_code(c2, 2, 0, 3)}, {{}}};
            auto r = density_transfer_check(A, L, d);
            CHECK(r.measured == doctest::Approx(0.0).epsilon(1e-12));
        }
}

TEST_CASE("triangle counts across trace beta-graphs") {
    GroupSpec g(3, 7);
    auto B = trace_factor(7, 3, 0, 1);
    TriadDescriptor d{{AtomLabel{{}, {1}}, AtomLabel{{}, {2}}, AtomLabel{{}, {1}}}, {{0}, {1}, {2}}};
    auto t = build_triad(g, B, d);
    const double pred = std::pow(3.0, -3) * double(t.parts[0].size() * t.parts[1].size() * t.parts[2].size());
    const double count = double(triangle_count(t));
    CHECK(std::abs(count / pred - 1) <= 0.1);
    CHECK(hom_count_check(t, 0.1).pass);
}

TEST_CASE("k222 count against enumeration on a small triad") {
    GroupSpec g(3, 3);
    auto B = trace_factor(3, 3, 0, 1);
    TriadDescriptor d{{AtomLabel{{}, {0}}, AtomLabel{{}, {1}}, AtomLabel{{}, {2}}}, {{1}, {0}, {2}}};
    auto t = build_triad(g, B, d);
    const auto &a = t.graphs[0], &b = t.graphs[1], &c = t.graphs[2];
    for (std::size_t u0 = 0; u0 < a.nu; ++u0)
        for (std::size_t v0 = 0; v0 < a.nv; ++v0)
            for (std::size_t w0 = 0; w0 < b.nv; ++w0) {
                if (!(a.edge(u0, v0) && b.edge(u0, w0) && c.edge(v0, w0))) continue;
                std::uint64_t naive = 0;
                for (std::size_t u1 = 0; u1 < a.nu; ++u1)
                    for (std::size_t v1 = 0; v1 < a.nv; ++v1)
                        for (std::size_t w1 = 0; w1 < b.nv; ++w1) {
                            bool all = true;
                            for (auto u : {u0, u1})
                                for (auto v : {v0, v1}) all = all && a.edge(u, v);
                            for (auto u : {u0, u1})
                                for (auto w : {w0, w1}) all = all && b.edge(u, w);
                            for (auto v : {v0, v1})
                                for (auto w : {w0, w1}) all = all && c.edge(v, w);
                            naive += all;
                        }
                CHECK(k222_count(t, u0, v0, w0) == naive);
            }
}

TEST_CASE("beta graphs of the trace factor are quasirandom at n = 8") {
    GroupSpec g(3, 8);
    auto B = trace_factor(8, 3, 0, 1);
    auto table = label_table(g, B);
    std::vector<std::vector<std::uint64_t>> atoms(3);
    for (std::uint64_t x = 0; x < g.order(); ++x) atoms[table[x]].push_back(x);
    for (int b = 0; b < 3; ++b) {
        auto r = dev2_measure(beta_graph(g, B, {b}, atoms[1], atoms[2]));
        CHECK(r.eps <= 0.05);
        CHECK(std::abs(r.d2 - 1.0 / 3) <= 0.02);
    }
}

TEST_CASE("dev23 of a random set over a trace triad") {
    GroupSpec g(3, 6);
    std::mt19937_64 rng(6);
    GroupSubset A(g);
    for (std::uint64_t x = 0; x < g.order(); ++x)
        if (rng() % 2) A.insert(x);
    auto B = trace_factor(6, 3, 0, 1);
    TriadDescriptor d{{AtomLabel{{}, {1}}, AtomLabel{{}, {2}}, AtomLabel{{}, {1}}}, {{0}, {1}, {2}}};
    auto r = dev23_measure(build_triad(g, B, d), A);
    CHECK(r.eps1 <= 0.1);
}

TEST_CASE("density transfer on GS shrinks with n") {
    std::vector<double> diffs;
    for (int n = 6; n <= 7; ++n) diffs.push_back(density_transfer_sweep(gs(n, 3), trace_factor(n, 3, 1, 1)).max_diff);
    CHECK(diffs[1] < diffs[0]);
}

TEST_CASE("reduced pairs classify atoms by density") {
    auto A = gs(5, 3);
    auto B = trace_factor(5, 3, 1, 1);
    auto red = reduced_pair(A, B, 0.2);
    GroupSpec g(3, 5);
    auto table = label_table(g, B);
    std::vector<std::uint64_t> size(9, 0), hits(9, 0);
    for (std::uint64_t x = 0; x < g.order(); ++x) ++size[table[x]], hits[table[x]] += A.contains(x);
    for (std::uint64_t c = 0; c < 9; ++c) {
        const double d = double(hits[c]) / double(size[c]);
        CHECK(red.A1.test(c) == (d >= 0.8));
        CHECK(red.A0.test(c) == (d <= 0.2));
        CHECK(red.err.test(c) == (d > 0.2 && d < 0.8));
        CHECK(red.HB.test(c) == (c % 3 == 0));
    }
}

TEST_CASE("QGS against Q_D: only the zero atom can be an error atom") {
    auto q = qgs(6, 3);
    for (int D = 1; D <= 3; ++D) {
        std::vector<FpSymMatrix> first(q.factor.quadratic().begin(), q.factor.quadratic().begin() + D);
        auto red = reduced_pair(q.set, QuadraticFactor(3, 6, {}, first), 0.0);
        for (std::uint64_t c = 1; c < red.labels.order(); ++c) CHECK_FALSE(red.err.test(c));
    }
}

TEST_CASE("GS against a pure linear factor: the zero atom is an error atom") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        GroupSpec g(3, 5);
        std::vector<FpVector> L{g.vector_of(1 + rng() % (g.order() - 1))};
        if (t % 2) L.push_back(g.vector_of(1 + rng() % (g.order() - 1)));
        auto red = reduced_pair(gs(5, 3), QuadraticFactor(3, 5, L), 0.3);
        CHECK(red.err.test(0));
    }
}

TEST_CASE("hypergraph decomposition of GS(6,3)") {
    auto r = hypergraph_decomposition_check(gs(6, 3), trace_factor(6, 3, 1, 1), 0.2, 0.2);
    CHECK(r.measured <= 0.2);
}
