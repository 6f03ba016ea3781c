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
#include "qfa/fp_core.hpp"

using namespace qfa;

TEST_CASE("primes and inverses") {
    CHECK(is_prime(3));
    CHECK(is_prime(7));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(9));
    for (int p : {3, 5, 7})
        for (int a = 1; a < p; ++a) CHECK(a * inv_mod(a, p) % p == 1);
}

TEST_CASE("group indexing is little-endian") {
    GroupSpec g(3, 3);
    CHECK(g.order() == 27);
    CHECK(g.index_of(FpVector(3, {1, 0, 0})) == 1);
    CHECK(g.index_of(FpVector(3, {0, 1, 0})) == 3);
    CHECK(g.index_of(FpVector(3, {0, 0, 2})) == 18);
    CHECK(g.vector_of(5).digits() == "210");
    for (std::uint64_t x = 0; x < g.order(); ++x) CHECK(g.index_of(g.vector_of(x)) == x);
}

TEST_CASE("group arithmetic matches coordinate arithmetic") {
    for (auto [p, n] : {std::pair{3, 3}, std::pair{5, 2}, std::pair{7, 2}, std::pair{3, 5}}) {
        GroupSpec g(p, n);
        for (std::uint64_t a = 0; a < g.order(); a += 1 + a % 3)
            for (std::uint64_t b = 0; b < g.order(); b += 1 + b % 5) {
                auto va = oracle::vec(a, p, n), vb = oracle::vec(b, p, n);
                CHECK(g.add(a, b) == oracle::index(oracle::add(va, vb, p), p));
                CHECK(g.dot(a, b) == oracle::dot(va, vb, p));
                CHECK(g.add(a, g.neg(a)) == 0);
                CHECK(g.sub(g.add(a, b), b) == a);
            }
    }
}

TEST_CASE("group construction validates its arguments") {
    CHECK_THROWS_AS(GroupSpec(2, 3), Error);
    CHECK_THROWS_AS(GroupSpec(9, 2), Error);
    CHECK_THROWS_AS(GroupSpec(3, 0), Error);
    CHECK_THROWS_AS(GroupSpec(3, 16), CapacityError);  // 3^16 > 2^24
    set_max_group_bits(26);
    CHECK(max_group_bits() == 26);
    set_max_group_bits(0);
    CHECK(max_group_bits() == 24);
}

TEST_CASE("vector and matrix operations") {
    FpVector a(3, {1, 2, 0}), b(3, {2, 2, 1});
    CHECK((a + b).digits() == "011");
    CHECK((a - b).digits() == "202");
    CHECK(a.dot(b) == (2 + 4) % 3);
    CHECK(FpVector::basis(3, 4, 2).digits() == "0010");
    CHECK_THROWS(FpSymMatrix(3, {{1, 2}, {0, 1}}));  // not symmetric
    FpSymMatrix I = FpSymMatrix::identity(3, 3);
    CHECK(quad_eval(I, FpVector(3, {1, 1, 1})) == 0);
    CHECK(quad_eval(I, FpVector(3, {1, 1, 0})) == 2);
}

TEST_CASE("matrix rank agrees with kernel counting") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 60; ++t) {
        const int n = 1 + t % 4;
        oracle::Mat m(n, std::vector<int>(n));
        FpSymMatrix M(3, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const int v = (t % 3 == 0 && rng() % 2) ? 0 : static_cast<int>(rng() % 3);
                m[i][j] = m[j][i] = v;
                M.set_sym(i, j, v);
            }
        CHECK(matrix_rank(M) == oracle::rank_by_kernel(m, 3));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                FpVector x = FpVector::basis(3, n, i), y = FpVector::basis(3, n, j);
                CHECK(bilin_eval(M, x, y) == m[i][j]);
            }
    }
}

TEST_CASE("row reduction and span dimension") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 40; ++t) {
        const int n = 2 + t % 3, k = 1 + t % 4;
        std::vector<oracle::Vec> vs;
        for (int i = 0; i < k; ++i) vs.push_back(oracle::vec(rng() % oracle::order(3, n), 3, n));
        CHECK(rank_of_rows(3, vs) == oracle::span_dim(vs, 3, n));
        auto rr = row_reduce(3, vs);
        CHECK(static_cast<int>(rr.size()) == oracle::span_dim(vs, 3, n));
        CHECK(oracle::span_dim(rr, 3, n) == oracle::span_dim(vs, 3, n));
    }
}

TEST_CASE("gauss sums match direct summation") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 40; ++t) {
        const int p = t % 2 ? 3 : 5, n = 1 + t % 3;
        GroupSpec g(p, n);
        oracle::Mat m(n, std::vector<int>(n));
        FpSymMatrix M(p, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const int v = static_cast<int>(rng() % p);
                m[i][j] = m[j][i] = v;
                M.set_sym(i, j, v);
            }
        const auto bi = rng() % g.order();
        const auto bv = oracle::vec(bi, p, n);
        std::complex<double> direct = 0;
        for (std::uint64_t x = 0; x < g.order(); ++x) {
            auto xv = oracle::vec(x, p, n);
            direct += oracle::omega(p, oracle::quad(m, xv, p) + oracle::dot(bv, xv, p));
        }
        direct /= double(g.order());
        CHECK(std::abs(gauss_sum(M, g.vector_of(bi)) - direct) < 1e-9);
    }
}

TEST_CASE("gauss sum of the identity form has modulus 3^{-n/2}") {
    for (int n = 1; n <= 8; ++n) {
        const double m = std::abs(gauss_sum(FpSymMatrix::identity(3, n), FpVector(3, n)));
        CHECK(m == doctest::Approx(std::pow(3.0, -n / 2.0)).epsilon(1e-9));
    }
}

TEST_CASE("dft matches the defining sum and inverts") {
    std::mt19937_64 rng(9);
    for (auto [p, n] : {std::pair{3, 2}, std::pair{3, 3}, std::pair{5, 2}}) {
        GroupSpec g(p, n);
        std::vector<Complex> f(g.order());
        for (auto& z : f) z = Complex(double(rng() % 100) / 50 - 1, double(rng() % 100) / 50 - 1);
        auto fh = dft(g, f);
        for (std::uint64_t t = 0; t < g.order(); ++t) {
            Complex s = 0;
            for (std::uint64_t x = 0; x < g.order(); ++x)
                s += f[x] * oracle::omega(p, -oracle::dot(oracle::vec(x, p, n), oracle::vec(t, p, n), p));
            CHECK(std::abs(fh[t] - s / double(g.order())) < 1e-9);
        }
        auto back = inverse_dft(g, fh);
        for (std::uint64_t x = 0; x < g.order(); ++x) CHECK(std::abs(back[x] - f[x]) < 1e-9);
    }
}

TEST_CASE("subsets and bitsets") {
    GroupSpec g(3, 2);
    GroupSubset A(g, [](std::uint64_t x) { return x % 2 == 0; });
    CHECK(A.size() == 5);
    CHECK(A.complement().size() == 4);
    CHECK(A.intersect(A.complement()).size() == 0);
    CHECK(A.unite(A.complement()).size() == 9);
    auto T = A.translate_back(1);
    for (std::uint64_t x = 0; x < 9; ++x) CHECK(T.contains(x) == A.contains(g.add(x, 1)));
    CHECK(u128_to_string(u128(1) << 100) == "1267650600228229401496703205376");
}
