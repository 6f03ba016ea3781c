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
#include <set>

#include "oracles.hpp"
#include "qfa/constructions.hpp"

using namespace qfa;

namespace {

std::set<std::string> member_digits(const GroupSubset& A) {
    std::set<std::string> s;
    for (auto x : A.members()) s.insert(A.spec().vector_of(x).digits());
    return s;
}

// Monic polynomial of degree <= 3 with coefficients c (c_0 first): irreducible iff no root.
bool no_root(const std::vector<int>& c, int p) {
    for (int x = 0; x < p; ++x) {
        long long v = 1;
        for (std::size_t i = c.size(); i-- > 0;) v = (v * x + c[i]) % p;
        if (v == 0) return false;
    }
    return true;
}

// Tr(t^m) in F_p[t]/(f), as the trace of the m-th power of the companion matrix.
std::vector<int> traces(const std::vector<int>& c, int p, int count) {
    const int n = static_cast<int>(c.size());
    oracle::Mat C(n, std::vector<int>(n, 0)), P(n, std::vector<int>(n, 0));
    for (int j = 0; j + 1 < n; ++j) C[j + 1][j] = 1;
    for (int i = 0; i < n; ++i) C[i][n - 1] = oracle::mod(-c[i], p), P[i][i] = 1;
    std::vector<int> tr;
    for (int m = 0; m < count; ++m) {
        int s = 0;
        for (int i = 0; i < n; ++i) s += P[i][i];
        tr.push_back(s % p);
        oracle::Mat Q(n, std::vector<int>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) Q[i][j] = (Q[i][j] + P[i][k] * C[k][j]) % p;
        P = Q;
    }
    return tr;
}

}  // namespace

TEST_CASE("GS(2,3) members") {
    CHECK(member_digits(gs(2, 3)) == std::set<std::string>{"10", "11", "12", "01"});
}

TEST_CASE("|GS(n,3)| = (3^n - 1)/2 and membership is 'first nonzero coordinate is 1'") {
    for (int n = 1; n <= 8; ++n) {
        auto A = gs(n, 3);
        CHECK(A.size() == (oracle::order(3, n) - 1) / 2);
        if (n <= 5)
            for (std::uint64_t x = 0; x < A.spec().order(); ++x) {
                auto v = oracle::vec(x, 3, n);
                int first = 0;
                for (int c : v)
                    if (c != 0) {
                        first = c;
                        break;
                    }
                CHECK(A.contains(x) == (first == 1));
            }
    }
}

TEST_CASE("GS metric and tau") {
    auto m = gs_metric(FpVector(3, {1, 0, 0}), FpVector(3, {1, 2, 0}));
    CHECK(m.lambda == 1);
    CHECK(m.d == doctest::Approx(0.5));
    CHECK(gs_metric(FpVector(3, {1, 2}), FpVector(3, {1, 2})).lambda == 2);
    CHECK(tau(2, 1, FpVector(3, {1, 1, 0})).digits() == "200");
    CHECK(first_nonzero(FpVector(3, {0, 0, 2})) == 3);
}

TEST_CASE("least irreducible polynomials") {
    for (int n = 2; n <= 3; ++n) {
        std::vector<int> expect;
        for (std::uint64_t code = 0; code < oracle::order(3, n); ++code) {
            auto c = oracle::vec(code, 3, n);
            if (no_root(c, 3)) {
                expect = c;
                break;
            }
        }
        CHECK(least_irreducible(n, 3) == expect);
    }
    CHECK(least_irreducible(2, 3) == std::vector<int>{1, 0});  // t^2 + 1
}

TEST_CASE("trace matrices are Hankel in Tr(t^m)") {
    for (int n : {2, 3, 4}) {
        auto tr = traces(least_irreducible(n, 3), 3, 3 * n);
        auto T = trace_sym_space(n, 3);
        REQUIRE(T.size() == static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) CHECK(T[k].at(i, j) == tr[i + j + k]);
    }
}

TEST_CASE("every nontrivial combination of trace matrices has full rank") {
    for (int n : {4, 5}) {
        auto T = trace_sym_space(n, 3);
        for (std::uint64_t code = 1; code < oracle::order(3, n); ++code) {
            auto coef = oracle::vec(code, 3, n);
            oracle::Mat m(n, std::vector<int>(n, 0));
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) m[i][j] = (m[i][j] + coef[k] * T[k].at(i, j)) % 3;
            CHECK(oracle::rank_by_kernel(m, 3) == n);
        }
    }
}

TEST_CASE("QGS is the set where the first nonzero quadratic value is 1") {
    auto q = qgs(5, 3);
    const auto& M = q.factor.quadratic();
    for (std::uint64_t x = 0; x < q.set.spec().order(); ++x) {
        auto v = oracle::vec(x, 3, 5);
        int first = 0;
        for (const auto& m : M) {
            oracle::Mat mm(5, std::vector<int>(5));
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) mm[i][j] = m.at(i, j);
            if (int val = oracle::quad(mm, v, 3); val != 0) {
                first = val;
                break;
            }
        }
        CHECK(q.set.contains(x) == (first == 1));
    }
}

TEST_CASE("QGS(8,3) density and atom sizes") {
    auto q = qgs(8, 3);
    CHECK(std::abs(q.set.density() - 0.5) <= 0.1);
    GroupSpec g(3, 8);
    for (int i = 1; i <= 3; ++i) {
        std::vector<FpSymMatrix> first(q.factor.quadratic().begin(), q.factor.quadratic().begin() + i);
        QuadraticFactor Qi(3, 8, {}, first);
        std::vector<int> b(static_cast<std::size_t>(i), 0);
        b.back() = 1;
        const double frac = double(atom_members(g, Qi, AtomLabel{{}, b}).size()) / double(g.order());
        CHECK(std::abs(frac - std::pow(3.0, -i)) <= std::pow(3.0, -8.0 / 2 + 1));
    }
}

TEST_CASE("quadrics") {
    CHECK(standard_quadric(3, 3, 0).size() == 9);
    CHECK(member_digits(standard_quadric(2, 3, 0)) == std::set<std::string>{"00"});
    auto A = standard_quadric(2, 5, 0).unite(standard_quadric(2, 5, 1));
    CHECK(A.size() == standard_quadric(2, 5, 0).size() + standard_quadric(2, 5, 1).size());
    FpSymMatrix M(3, 2);
    M.set_sym(0, 1, 1);  // 2 x_1 x_2
    auto B = quadric(2, 3, M, 0);
    CHECK(member_digits(B) == std::set<std::string>{"00", "10", "20", "01", "02"});
}

TEST_CASE("sparse example") {
    CHECK(member_digits(sparse_example(4, 3)) == std::set<std::string>{"1010", "0110", "0101"});
    CHECK(sparse_example(8, 3).size() == 10);
    CHECK_THROWS_AS(sparse_example(5, 3), ValidationError);
}

TEST_CASE("unions of cosets and atoms") {
    GroupSpec g(3, 3);
    LinearFactor H{3, 3, {FpVector(3, {1, 1, 0})}};
    auto A = union_of_cosets(g, H, {FpVector(3, {1, 0, 0})});
    for (std::uint64_t x = 0; x < 27; ++x) CHECK(A.contains(x) == (oracle::dot(oracle::vec(x, 3, 3), {1, 1, 0}, 3) == 1));
    auto B = trace_factor(3, 3, 1, 1);
    auto U = union_of_atoms(g, B, {AtomLabel{{0}, {0}}, AtomLabel{{1}, {2}}});
    CHECK(U.size() == atom_members(g, B, AtomLabel{{0}, {0}}).size() + atom_members(g, B, AtomLabel{{1}, {2}}).size());
}

TEST_CASE("trace factor shape") {
    auto B = trace_factor(6, 3, 2, 1);
    CHECK(B.ell() == 2);
    CHECK(B.q() == 1);
    CHECK(B.linear()[0].digits() == "100000");
    CHECK(B.linear()[1].digits() == "010000");
    CHECK(B.quadratic()[0] == trace_sym_space(6, 3)[0]);
}

TEST_CASE("GS translate-intersection identities") {
    std::mt19937_64 rng(17);
    GroupSpec g(3, 3);
    for (int t = 0; t < 500; ++t) {
        auto b = g.vector_of(rng() % 27), c = g.vector_of(rng() % 27);
        if (b == c) continue;
        auto r = verify_gs_intersection(b, c, 3, 3);
        CHECK(r.holds());
        CHECK(r.mixed_fired == 1);
        CHECK(r.ones_fired == 1);
        CHECK(r.zeros_fired == 1);
    }
    auto r = verify_gs_intersection(FpVector(3, {0, 0, 0}), FpVector(3, {1, 0, 0}), 3, 3);
    CHECK(r.mixed_case == 1);
    CHECK(r.holds());
    CHECK_THROWS_AS(verify_gs_intersection(FpVector(3, {1, 0, 0}), FpVector(3, {1, 0, 0}), 3, 3), ValidationError);
}
