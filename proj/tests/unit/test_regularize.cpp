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
#include "qfa/regularize.hpp"

using namespace qfa;

namespace {

std::vector<std::uint64_t> members_of(const GroupSpec& g, const LinearFactor& H) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        bool in = true;
        for (const auto& v : H.vectors) in = in && oracle::dot(oracle::vec(x, g.p(), g.n()), v.coords(), g.p()) == 0;
        if (in) out.push_back(x);
    }
    return out;
}

// max_t |E_{h in H} (1_A(h + y) - delta) w^{-h.t}| over all characters t of G.
double uniformity_oracle(const GroupSubset& A, const LinearFactor& H, std::uint64_t y) {
    const GroupSpec& g = A.spec();
    auto mem = members_of(g, H);
    double delta = 0;
    for (auto h : mem) delta += A.contains(g.add(h, y));
    delta /= double(mem.size());
    double best = 0;
    for (std::uint64_t t = 0; t < g.order(); ++t) {
        Complex s = 0;
        for (auto h : mem)
            s += (A.contains(g.add(h, y)) - delta) *
                 oracle::omega(g.p(), -oracle::dot(oracle::vec(h, g.p(), g.n()), oracle::vec(t, g.p(), g.n()), g.p()));
        best = std::max(best, std::abs(s) / double(mem.size()));
    }
    return best;
}

GroupSubset random_set(const GroupSpec& g, std::mt19937_64& rng, double d) {
    std::uniform_real_distribution<double> u(0, 1);
    GroupSubset A(g);
    for (std::uint64_t x = 0; x < g.order(); ++x)
        if (u(rng) < d) A.insert(x);
    return A;
}

}  // namespace

TEST_CASE("eps-atomic densities") {
    CHECK(is_eps_atomic(0.0, 0.0));
    CHECK(is_eps_atomic(1.0, 0.0));
    CHECK_FALSE(is_eps_atomic(0.5, 0.0));
    CHECK(is_eps_atomic(0.05, 0.1));
    CHECK(is_eps_atomic(0.95, 0.1));
    CHECK_FALSE(is_eps_atomic(0.5, 0.4));
}

TEST_CASE("atomicity check on a hand-made partition") {
    GroupSpec g(3, 2);
    GroupSubset A(g);
    for (std::uint64_t x : {0, 1, 2, 3}) A.insert(x);
    // parts {0,1,2}, {3,4,5}, {6,7,8}: densities 1, 1/3, 0.
    std::vector<std::uint32_t> part{0, 0, 0, 1, 1, 1, 2, 2, 2};
    auto v = atomicity_check(part, A, 0.1, 0.4);
    CHECK(v.near1 == std::vector<std::uint32_t>{0});
    CHECK(v.near0 == std::vector<std::uint32_t>{2});
    CHECK(v.err == std::vector<std::uint32_t>{1});
    CHECK(v.err_mass == 3);
    CHECK(v.err_fraction() == doctest::Approx(1.0 / 3));
    CHECK(v.almost());
    CHECK_FALSE(v.atomic());
    CHECK_FALSE(atomicity_check(part, A, 0.1, 0.3).almost());
}

TEST_CASE("growth functions") {
    CHECK(GrowthFunction("x")(5) == 5);
    CHECK(GrowthFunction("2*x")(5) == 10);
    CHECK(GrowthFunction("2*x+1")(3) == 7);
    CHECK(GrowthFunction("x^2+x")(3) == 12);
    CHECK(GrowthFunction("3*x^2")(2) == 12);
    CHECK(GrowthFunction("4")(9) == 4);
    CHECK_THROWS(GrowthFunction("y"));
    CHECK_THROWS(GrowthFunction("2*x+"));
}

TEST_CASE("coset uniformity matches the Fourier definition") {
    std::mt19937_64 rng(1);
    GroupSpec g(3, 4);
    for (int t = 0; t < 8; ++t) {
        auto A = random_set(g, rng, 0.3 + 0.05 * t);
        LinearFactor H{3, 4, {}};
        for (int j = 0; j < t % 3; ++j) H.vectors.push_back(g.vector_of(1 + rng() % 80));
        const std::uint64_t y = rng() % 81;
        CHECK(coset_uniformity(A, H, y) == doctest::Approx(uniformity_oracle(A, H, y)).epsilon(1e-9));
        auto mem = subspace_members(g, H);
        CHECK(mem == members_of(g, H));
    }
}

TEST_CASE("uniform dense cosets satisfy their postconditions") {
    std::mt19937_64 rng(2);
    GroupSpec g(3, 5);
    for (int t = 0; t < 12; ++t) {
        const double eps = t % 2 ? 0.3 : 0.5;
        GroupSubset A(g);
        if (t % 3 == 0) {
            A = random_set(g, rng, 0.5);
        } else {
            LinearFactor L{3, 5, {g.vector_of(1 + rng() % 242)}};
            A = union_of_cosets(g, L, {g.vector_of(rng() % 243)});
            if (t % 3 == 2) A = A.unite(random_set(g, rng, 0.1));
        }
        LinearFactor H{3, 5, {}};
        auto r = find_uniform_dense_coset(A, H, eps);
        CHECK(r.codim <= static_cast<int>(2 / eps));
        CHECK(oracle::span_dim([&] {
                  std::vector<oracle::Vec> vs;
                  for (const auto& v : r.sub.vectors) vs.push_back(v.coords());
                  return vs;
              }(), 3, 5) == r.codim);
        auto mem = members_of(g, r.sub);
        double hits = 0;
        for (auto h : mem) hits += A.contains(g.add(h, r.y));
        CHECK(hits / double(mem.size()) + 1e-12 >= A.density());
        CHECK(uniformity_oracle(A, r.sub, r.y) <= eps + 1e-9);
    }
}

TEST_CASE("an index-3 subgroup") {
    GroupSpec g(3, 8);
    auto A = union_of_cosets(g, LinearFactor{3, 8, {FpVector::basis(3, 8, 0)}}, {FpVector(3, 8)});
    auto r = find_uniform_dense_coset(A, LinearFactor{3, 8, {}}, 0.4);
    CHECK(r.density >= 1.0 / 3);
    CHECK(r.codim <= 5);
    CHECK(r.uniformity <= 0.4);
}

TEST_CASE("dense subspace or counted encodings") {
    GroupSpec g(3, 6);
    auto A = union_of_cosets(g, LinearFactor{3, 6, {FpVector::basis(3, 6, 1)}}, {FpVector(3, 6)});
    auto v = find_dense_subspace(A, LinearFactor{3, 6, {}}, 0.2, 1);
    REQUIRE(std::holds_alternative<DenseSubspace>(v));
    const auto& d = std::get<DenseSubspace>(v);
    CHECK(d.coset.density >= 0.8);
    CHECK(d.coset.codim <= d.codim_budget);

    std::mt19937_64 rng(3);
    auto R = random_set(g, rng, 0.5);
    auto e = find_dense_subspace(R, LinearFactor{3, 6, {}}, 0.1, 1, 2, 0.3);
    REQUIRE(std::holds_alternative<EncodingEvidence>(e));
    const auto& ev = std::get<EncodingEvidence>(e);
    CHECK(ev.count >= 1);
    CHECK(revalidate(ev.witness, R));
    auto sub = members_of(g, ev.coset.sub);
    std::vector<char> in_sub(g.order(), 0);
    for (auto x : sub) in_sub[x] = 1;
    for (auto leaf : ev.witness.role("leaves")) CHECK(in_sub[leaf]);
    for (auto node : ev.witness.role("nodes")) CHECK(in_sub[g.sub(node, ev.coset.y)]);
}

TEST_CASE("stable decomposition of coset unions") {
    GroupSpec g(3, 8);
    LinearFactor H0{3, 8, {FpVector(3, {1, 1, 0, 0, 0, 0, 0, 0}), FpVector(3, {0, 0, 1, 2, 0, 1, 0, 0})}};
    for (int c = 1; c <= 3; ++c) {
        std::vector<FpVector> reps{FpVector(3, 8)};
        if (c >= 2) reps.push_back(FpVector::basis(3, 8, 0));
        if (c >= 3) reps.push_back(FpVector::basis(3, 8, 2));
        auto A = union_of_cosets(g, H0, reps);
        auto r = stable_linear_decomposition(A, LinearFactor{3, 8, {}}, {}, StableParams{});
        CHECK(r.pass);
        CHECK(r.omega.empty());
        CHECK(r.m <= 2);
        CHECK(factor_chain_check(r.chain, A).all());
        // A is a union of cosets of the returned subspace.
        auto table = linear_table(g, r.sub);
        std::vector<int> seen(static_cast<std::size_t>(*std::max_element(table.begin(), table.end()) + 1), -1);
        for (std::uint64_t x = 0; x < g.order(); ++x) {
            int& s = seen[table[x]];
            if (s < 0) s = A.contains(x);
            CHECK(s == int(A.contains(x)));
        }
    }
}

TEST_CASE("stable decomposition of GS(8,3)") {
    StableParams sp;
    sp.eps = 0.1;
    sp.max_codim = 6;
    auto A = gs(8, 3);
    auto r = stable_linear_decomposition(A, LinearFactor{3, 8, {}}, {}, sp);
    CHECK(r.pass);
    CHECK(r.m <= 6);
    CHECK(r.error_fraction_by_m.back() <= 0.2);
    CHECK(factor_chain_check(r.chain, A).all());
}

TEST_CASE("factor chain check rejects bad chains") {
    GroupSpec g(3, 4);
    auto A = union_of_cosets(g, LinearFactor{3, 4, {FpVector::basis(3, 4, 0)}}, {FpVector(3, 4)});
    FactorChain c;
    c.D = 4;
    c.factors = {LinearFactor{3, 4, {}}, LinearFactor{3, 4, {}}};
    c.gamma = {{1}};
    auto r = factor_chain_check(c, A);
    CHECK_FALSE(r.growth);
    FactorChain d;
    d.D = 4;
    d.factors = {LinearFactor{3, 4, {FpVector::basis(3, 4, 1)}}, LinearFactor{3, 4, {FpVector::basis(3, 4, 0)}}};
    d.gamma = {{1, 0, 0}};
    CHECK_FALSE(factor_chain_check(d, A).syntactic);
}

TEST_CASE("refinement stability on GS(6,3)") {
    GroupSpec g(3, 6);
    auto A = gs(6, 3);
    LinearFactor coarse{3, 6, {FpVector::basis(3, 6, 0)}};
    LinearFactor fine{3, 6, {FpVector::basis(3, 6, 0), FpVector::basis(3, 6, 1)}};
    auto r = refinement_stability_check(linear_table(g, coarse), linear_table(g, fine), A, 0.3, 0.01);
    REQUIRE(r.precondition);
    CHECK(r.holds);
}

TEST_CASE("AQALE fails for QGS against high-rank trace factors") {
    auto q = qgs(6, 3);
    for (auto [l, qq] : {std::pair{0, 1}, std::pair{1, 1}, std::pair{1, 2}}) {
        auto v = aqale_check(trace_factor(6, 3, l, qq), q.set, 0.1, 0.1);
        CHECK_FALSE(v.pass);
        CHECK(v.every_linear_atom_mid());
    }
}

TEST_CASE("brute-force quadratic atomization") {
    auto Q = standard_quadric(3, 3, 0);
    auto r = brute_quad_atomize(Q, 0.0);
    REQUIRE(r.found);
    CHECK(r.complexity == 1);
    auto table = label_table(Q.spec(), r.factor);
    for (std::uint64_t x = 0; x < 27; ++x)
        for (std::uint64_t y = 0; y < 27; ++y)
            if (table[x] == table[y]) CHECK(Q.contains(x) == Q.contains(y));
    auto G = brute_quad_atomize(gs(3, 3), 0.1);
    REQUIRE(G.found);
    CHECK(G.complexity == 3);
    CHECK(G.factor.ell() == 3);
    CHECK(G.factor.q() == 0);
}

TEST_CASE("guided FOP2 extraction from the QGS good copy") {
    auto q = qgs(6, 3);
    std::vector<FpSymMatrix> m3(q.factor.quadratic().begin(), q.factor.quadratic().begin() + 3);
    auto red = reduced_pair(q.set, QuadraticFactor(3, 6, {}, m3), 0.1);
    auto code = [](std::vector<int> b) { return label_code(AtomLabel{{}, b}, 3); };
    Witness w;
    w.kind = WitnessKind::GOODCOPY;
    w.k = 2;
    w.role_names = {"a", "b"};
    w.roles = {{code({1, 1, 0}), code({0, 1, 1})}, {code({2, 0, 0}), code({0, 2, 0})}};
    REQUIRE(revalidate_good_copy(w, red.labels, red.A1, red.A0, &red.HB));
    auto r = fop2_guided_extraction(q.set, red, w);
    REQUIRE(r.search.status == SearchStatus::FOUND);
    CHECK(revalidate(r.search.witness, q.set));
}
