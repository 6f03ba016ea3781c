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

#include "qfa/suites.hpp"

#include <fmt/format.h>
#include <tbb/parallel_for.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "qfa/constructions.hpp"
#include "qfa/detectors.hpp"
#include "qfa/factors.hpp"
#include "qfa/fp_core.hpp"
#include "qfa/io.hpp"
#include "qfa/regularize.hpp"
#include "qfa/uniformity.hpp"

namespace qfa {

namespace {

struct Outcome {
    bool pass = false;
    double measured = 0;
    double bound = 0;
    std::string witness;
};

struct CheckDef {
    std::string id;
    std::string anchor;
    std::function<Outcome()> run;
};

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }
int below(Rng& rng, std::uint64_t m) { return static_cast<int>(rng() % m); }

GroupSubset random_subset(const GroupSpec& g, Rng& rng, double density) {
    GroupSubset A(g);
    for (std::uint64_t x = 0; x < g.order(); ++x)
        if (uniform01(rng) < density) A.insert(x);
    return A;
}

FpSymMatrix random_matrix(int p, int n, Rng& rng) {
    FpSymMatrix M(p, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) M.set_sym(i, j, below(rng, p));
    return M;
}

FpVector random_vector(const GroupSpec& g, Rng& rng) { return g.vector_of(rng() % g.order()); }

std::uint64_t idx(const GroupSpec& g, const std::string& digits) { return g.index_of(parse_vector(digits, g.p(), g.n())); }

std::string vec_list(const GroupSpec& g, const std::vector<std::uint64_t>& xs) {
    std::string s;
    for (auto x : xs) s += (s.empty() ? "" : " ") + g.vector_of(x).digits();
    return s;
}

// ---------------------------------------------------------------- oracles

double naive_dev2(const BipartiteGraph& G) {
    const double d = double(G.edges()) / double(G.nu * G.nv);
    auto h = [&](std::size_t u, std::size_t v) { return (G.edge(u, v) ? 1.0 : 0.0) - d; };
    double s = 0;
    for (std::size_t u0 = 0; u0 < G.nu; ++u0)
        for (std::size_t u1 = 0; u1 < G.nu; ++u1)
            for (std::size_t v0 = 0; v0 < G.nv; ++v0)
                for (std::size_t v1 = 0; v1 < G.nv; ++v1) s += h(u0, v0) * h(u0, v1) * h(u1, v0) * h(u1, v1);
    return s / (double(G.nu) * double(G.nu) * double(G.nv) * double(G.nv));
}

double naive_oct(const Tensor3& t) {
    double s = 0;
    for (std::size_t u0 = 0; u0 < t.nu; ++u0)
        for (std::size_t u1 = 0; u1 < t.nu; ++u1)
            for (std::size_t v0 = 0; v0 < t.nv; ++v0)
                for (std::size_t v1 = 0; v1 < t.nv; ++v1)
                    for (std::size_t w0 = 0; w0 < t.nw; ++w0)
                        for (std::size_t w1 = 0; w1 < t.nw; ++w1)
                            s += t.at(u0, v0, w0) * t.at(u0, v0, w1) * t.at(u0, v1, w0) * t.at(u0, v1, w1) *
                                 t.at(u1, v0, w0) * t.at(u1, v0, w1) * t.at(u1, v1, w0) * t.at(u1, v1, w1);
    return s;
}

// All assignments of nodes (heap order) and leaves, branch constraints only.
std::uint64_t naive_tree_count(const GroupSubset& A, int d) {
    const GroupSpec& g = A.spec();
    const std::size_t nodes = (std::size_t(1) << d) - 1, leaves = std::size_t(1) << d, vars = nodes + leaves;
    const std::uint64_t N = g.order();
    std::vector<std::uint64_t> v(vars, 0);
    std::uint64_t count = 0;
    while (true) {
        bool ok = true;
        for (std::size_t eta = 0; eta < leaves && ok; ++eta)
            for (int len = 0; len < d && ok; ++len) {
                const std::size_t node = (std::size_t(1) << len) - 1 + (eta >> (d - len));
                const bool bit = (eta >> (d - len - 1)) & 1U;
                ok = A.contains(g.add(v[node], v[nodes + eta])) == bit;
            }
        count += ok;
        std::size_t t = 0;
        while (t < vars && ++v[t] == N) v[t++] = 0;
        if (t == vars) break;
    }
    return count;
}

// ------------------------------------------------------------------ suite gs

std::vector<CheckDef> gs_suite(const SuiteParams& prm) {
    const int nmax = prm.n > 0 ? prm.n : 3;
    std::vector<CheckDef> c;
    c.push_back({"1a", "Z = {000, 012, 021} shattered in GS(3,3) by the eight listed translates", [] {
                     auto A = gs(3, 3);
                     const GroupSpec& g = A.spec();
                     std::vector<std::uint64_t> Z{idx(g, "000"), idx(g, "012"), idx(g, "021")};
                     std::vector<std::uint64_t> b(8, g.order());
                     for (const char* t : {"011", "020", "000", "010", "001", "022", "100", "200"}) {
                         std::size_t S = 0;
                         for (int i = 0; i < 3; ++i)
                             if (A.contains(g.add(Z[i], idx(g, t)))) S |= std::size_t(1) << i;
                         b[S] = idx(g, t);
                     }
                     Outcome o;
                     o.bound = 8;
                     o.measured = double(std::count_if(b.begin(), b.end(), [&](auto x) { return x < g.order(); }));
                     if (o.measured < 8) {
                         o.witness = "translates realise only " + fmt::format("{}", o.measured) + " patterns";
                         return o;
                     }
                     Witness w;
                     w.kind = WitnessKind::VC;
                     w.k = 3;
                     w.role_names = {"a", "b"};
                     w.roles = {Z, b};
                     o.pass = revalidate(w, A);
                     o.witness = "b_S: " + vec_list(g, b);
                     return o;
                 }});
    c.push_back({"1b", "vc_dim(GS(3,3)) = vc_dim(GS(4,3)) = 3, exhaustive", [] {
                     Outcome o;
                     o.bound = 3;
                     auto r3 = vc_dim(gs(3, 3), 4), r4 = vc_dim(gs(4, 3), 4);
                     o.measured = std::max(r3.dim, r4.dim);
                     o.pass = r3.dim == 3 && r4.dim == 3 && r3.exact && r4.exact && revalidate(r3.witness, gs(3, 3)) &&
                              revalidate(r4.witness, gs(4, 3));
                     o.witness = fmt::format("GS(3,3): {} ({}), GS(4,3): {} ({})", r3.dim, r3.exact ? "exact" : "bound",
                                             r4.dim, r4.exact ? "exact" : "bound");
                     return o;
                 }});
    c.push_back({"1c", "nine-vector 3-HOP2 witness in GS(4,3) revalidates", [] {
                     auto A = gs(4, 3);
                     const GroupSpec& g = A.spec();
                     Witness w;
                     w.kind = WitnessKind::HOP2;
                     w.k = 3;
                     w.role_names = {"a", "b", "c"};
                     w.roles = {{idx(g, "2220"), idx(g, "2210"), idx(g, "2120")},
                                {idx(g, "2220"), idx(g, "2200"), idx(g, "0220")},
                                {idx(g, "2221"), idx(g, "2011"), idx(g, "2021")}};
                     Outcome o;
                     o.pass = revalidate(w, A);
                     o.measured = o.pass;
                     o.bound = 1;
                     return o;
                 }});
    c.push_back({"1d", "find_hop2(GS(n,3), 4) = NONE, exhaustive", [nmax] {
                     Outcome o;
                     o.pass = true;
                     for (int n = 2; n <= nmax; ++n) {
                         auto r = find_hop2(gs(n, 3), 4);
                         o.witness += fmt::format("n={}: {} ({} nodes) ", n, to_string(r.status), r.nodes);
                         if (r.status != SearchStatus::NONE) o.pass = false, o.measured = n;
                     }
                     return o;
                 }});
    c.push_back({"1e", "GS(6,3) density on L(0) lies in [1/3, 2/3] for every linear factor of complexity <= 2", [] {
                     auto A = gs(6, 3);
                     const GroupSpec& g = A.spec();
                     // One RREF basis per subspace of the dual of dimension <= 2.
                     std::set<std::vector<std::vector<int>>> seen;
                     double lo = 1, hi = 0;
                     std::uint64_t factors = 0;
                     auto visit = [&](const std::vector<FpVector>& vs) {
                         std::vector<std::vector<int>> rows;
                         for (const auto& v : vs) rows.push_back(v.coords());
                         auto key = rows.empty() ? rows : row_reduce(3, rows);
                         if (key.size() != vs.size() || !seen.insert(key).second) return;
                         ++factors;
                         std::uint64_t in = 0, tot = 0;
                         for (std::uint64_t x = 0; x < g.order(); ++x) {
                             bool zero = true;
                             for (const auto& v : vs) zero = zero && g.vector_of(x).dot(v) == 0;
                             if (zero) ++tot, in += A.contains(x);
                         }
                         const double d = double(in) / double(tot);
                         lo = std::min(lo, d), hi = std::max(hi, d);
                     };
                     visit({});
                     std::vector<FpVector> all;
                     for (std::uint64_t v = 1; v < g.order(); ++v) all.push_back(g.vector_of(v));
                     for (std::size_t i = 0; i < all.size(); ++i) {
                         visit({all[i]});
                         for (std::size_t j = i + 1; j < all.size(); ++j) visit({all[i], all[j]});
                     }
                     Outcome o;
                     o.measured = std::max(1.0 / 3 - lo, hi - 2.0 / 3);
                     o.bound = 0;
                     o.pass = lo >= 1.0 / 3 - 1e-12 && hi <= 2.0 / 3 + 1e-12 && factors == 1 + 364 + 11011;
                     o.witness = fmt::format("{} factors, densities in [{:.6f}, {:.6f}]", factors, lo, hi);
                     return o;
                 }});
    c.push_back({"1f", "GS translate-intersection identities on 500 random (b, c), n = 3", [seed = prm.seed] {
                     Rng rng(seed);
                     GroupSpec g(3, 3);
                     Outcome o;
                     o.bound = 0;
                     for (int t = 0; t < 500; ++t) {
                         auto b = random_vector(g, rng), cc = random_vector(g, rng);
                         while (cc == b) cc = random_vector(g, rng);
                         auto r = verify_gs_intersection(b, cc, 3, 3);
                         if (!r.holds()) {
                             ++o.measured;
                             if (o.witness.empty()) o.witness = "b=" + b.digits() + " c=" + cc.digits();
                         }
                     }
                     o.pass = o.measured == 0;
                     return o;
                 }});
    return c;
}

// ------------------------------------------------------------- suite quadric

std::vector<CheckDef> quadric_suite(const SuiteParams& prm) {
    const int nmax = prm.n > 0 ? prm.n : 3;
    std::vector<CheckDef> c;
    c.push_back({"2a", "x^T x = 0: CAP2 holds and no 2-HOP2, n <= 3", [nmax] {
                     Outcome o;
                     o.pass = true;
                     for (int n = 1; n <= nmax; ++n) {
                         auto A = standard_quadric(n, 3, 0);
                         auto cap = cap2_check(A);
                         auto h = find_hop2(A, 2);
                         o.witness += fmt::format("n={}: cap2 {}, hop2 {}; ", n, cap.holds ? "holds" : "fails", to_string(h.status));
                         if (!cap.holds || cap.status != SearchStatus::NONE || h.status != SearchStatus::NONE) o.pass = false;
                     }
                     o.measured = o.pass;
                     o.bound = 1;
                     return o;
                 }});
    c.push_back({"2b", "x^T x = 0: no 2-FOP2 at n = 2", [] {
                     auto r = find_fop2(standard_quadric(2, 3, 0), 2);
                     Outcome o;
                     o.pass = r.status == SearchStatus::NONE;
                     o.measured = o.pass;
                     o.bound = 1;
                     o.witness = to_string(r.status);
                     return o;
                 }});
    c.push_back({"2c", "x^T x = 0: vc2_dim <= 1, n <= 3", [nmax] {
                     Outcome o;
                     o.bound = 1;
                     o.pass = true;
                     for (int n = 1; n <= nmax; ++n) {
                         auto r = vc2_dim(standard_quadric(n, 3, 0), 3);
                         o.measured = std::max<double>(o.measured, r.dim);
                         o.witness += fmt::format("n={}: {} ({}); ", n, r.dim, r.exact ? "exact" : "bound");
                         if (r.dim > 1 || !r.exact) o.pass = false;
                     }
                     return o;
                 }});
    c.push_back({"2d", "|{x in F_3^3 : x^T x = 0}| = 9", [] {
                     Outcome o;
                     o.measured = double(standard_quadric(3, 3, 0).size());
                     o.bound = 9;
                     o.pass = o.measured == 9;
                     return o;
                 }});
    return c;
}

// ----------------------------------------------------------------- suite qgs

QuadraticFactor qgs_prefix(const QgsResult& q, int m) {
    std::vector<FpSymMatrix> ms(q.factor.quadratic().begin(), q.factor.quadratic().begin() + m);
    return QuadraticFactor(q.factor.p(), q.factor.n(), {}, ms);
}

Witness qgs_good_copy(int k) {
    // a_i = e_i + e_{i+1}, b_i = (p-1) e_i over the labels of Q_{k+1}.
    Witness w;
    w.kind = WitnessKind::GOODCOPY;
    w.k = k;
    w.role_names = {"a", "b"};
    w.roles.assign(2, {});
    for (int i = 0; i < k; ++i) {
        std::vector<int> a(static_cast<std::size_t>(k + 1), 0), b(static_cast<std::size_t>(k + 1), 0);
        a[i] = a[i + 1] = 1;
        b[i] = 2;
        w.roles[0].push_back(label_code(AtomLabel{{}, a}, 3));
        w.roles[1].push_back(label_code(AtomLabel{{}, b}, 3));
    }
    return w;
}

// Rank threshold for the AQALE family: the atom-size error term p^{l+q-r/2} is at most 1/p.
int aqale_rank_threshold(int complexity) { return 2 * complexity + 2; }

std::vector<CheckDef> qgs_suite(const SuiteParams& prm) {
    std::vector<CheckDef> c;
    c.push_back({"3a", "density of QGS(8,3) lies in [0.4, 0.6]", [] {
                     Outcome o;
                     o.measured = qgs(8, 3).set.density();
                     o.bound = 0.6;
                     o.pass = o.measured >= 0.4 && o.measured <= 0.6;
                     return o;
                 }});
    c.push_back({"3b", "labels a_i = e_i + e_{i+1}, b_i = 2 e_i form a good copy of H(3) in Red(QGS(6,3)), right side in H_B",
                 [] {
                     auto q = qgs(6, 3);
                     auto red = reduced_pair(q.set, qgs_prefix(q, 4), 0.1);
                     auto w = qgs_good_copy(3);
                     Outcome o;
                     o.pass = revalidate_good_copy(w, red.labels, red.A1, red.A0, &red.HB);
                     o.measured = o.pass;
                     o.bound = 1;
                     o.witness = fmt::format("A1 atoms {}, A0 atoms {}, error atoms {}", red.A1.count(), red.A0.count(),
                                             red.err.count());
                     return o;
                 }});
    c.push_back({"3c", "AQALE fails for QGS(6,3) against high-rank factors with (l,q) <= (2,2); every L-atom has a cell of density in (1/6, 5/6)",
                 [seed = prm.seed] {
                     auto q = qgs(6, 3);
                     GroupSpec g(3, 6);
                     std::vector<QuadraticFactor> family;
                     std::uint64_t excluded = 0;
                     auto consider = [&](const QuadraticFactor& B) {
                         if (factor_rank(B) >= aqale_rank_threshold(B.ell() + B.q()))
                             family.push_back(B);
                         else
                             ++excluded;
                     };
                     for (int l = 0; l <= 2; ++l)
                         for (int qq = 0; qq <= 2; ++qq) consider(trace_factor(6, 3, l, qq));
                     Rng rng(seed);
                     int drawn = 0;
                     while (drawn < 60) {
                         const int l = below(rng, 3), qq = below(rng, 3);
                         std::vector<FpVector> L;
                         std::vector<std::vector<int>> rows;
                         for (int i = 0; i < l; ++i) {
                             L.push_back(g.vector_of(1 + rng() % (g.order() - 1)));
                             rows.push_back(L.back().coords());
                         }
                         if (l > 0 && rank_of_rows(3, rows) != l) continue;
                         std::vector<FpSymMatrix> M;
                         for (int j = 0; j < qq; ++j) M.push_back(random_matrix(3, 6, rng));
                         ++drawn;
                         consider(QuadraticFactor(3, 6, L, M));
                     }
                     Outcome o;
                     o.pass = true;
                     o.bound = 0;
                     for (const auto& B : family) {
                         auto v = aqale_check(B, q.set, 0.1, 0.1);
                         if (v.pass || !v.every_linear_atom_mid()) {
                             o.pass = false;
                             ++o.measured;
                             o.witness += fmt::format("(l={}, q={}, rank={}): pass={} mid={}/{}; ", B.ell(), B.q(), factor_rank(B),
                                                      v.pass, v.mid_linear_atoms, v.linear_atoms);
                         }
                     }
                     o.witness += fmt::format("{} factors tested, {} below the rank threshold 2(l+q)+2", family.size(), excluded);
                     return o;
                 }});
    c.push_back({"3d", "guided extraction turns the QGS(6,3) good copy of H(2) into a revalidating 2-FOP2", [] {
                     auto q = qgs(6, 3);
                     auto red = reduced_pair(q.set, qgs_prefix(q, 3), 0.1);
                     SearchBudget b;
                     b.node_limit = 500'000'000ULL;
                     auto r = fop2_guided_extraction(q.set, red, qgs_good_copy(2), b);
                     Outcome o;
                     o.pass = r.search.status == SearchStatus::FOUND && revalidate(r.search.witness, q.set);
                     o.measured = o.pass;
                     o.bound = 1;
                     o.witness = fmt::format("{} after {} (x, z) tuples: {}", to_string(r.search.status), r.search.nodes, r.message);
                     return o;
                 }});
    return c;
}

// ---------------------------------------------------------- suite uniformity

std::vector<CheckDef> uniformity_suite(const SuiteParams& prm) {
    std::vector<CheckDef> c;
    const std::uint64_t seed = prm.seed;
    c.push_back({"4a", "|gauss_sum(M, b)| <= 3^{-rank/2} + 1e-9 on 1000 random (M, b), n = 6", [seed] {
                     Rng rng(seed);
                     GroupSpec g(3, 6);
                     Outcome o;
                     o.measured = -1;
                     o.bound = 1e-9;
                     for (int t = 0; t < 1000; ++t) {
                         auto M = random_matrix(3, 6, rng);
                         auto b = random_vector(g, rng);
                         const double ex = std::abs(gauss_sum(M, b)) - std::pow(3.0, -matrix_rank(M) / 2.0);
                         if (ex > o.measured) {
                             o.measured = ex;
                             o.witness = fmt::format("rank {} b {}", matrix_rank(M), b.digits());
                         }
                     }
                     o.pass = o.measured <= o.bound;
                     return o;
                 }});
    c.push_back({"4b", "||f||_{U2}^4 = sum |f^|^4 within 1e-9 on 200 random f, n <= 8", [seed] {
                     Rng rng(seed + 1);
                     Outcome o;
                     o.bound = 1e-9;
                     for (int t = 0; t < 200; ++t) {
                         const int n = 1 + t % 8;
                         GroupSpec g(3, n);
                         const std::uint64_t N = g.order();
                         std::vector<Complex> f(N);
                         for (auto& z : f) z = Complex(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
                         // E_h |E_x f(x) conj f(x + h)|^2 in physical space.
                         double direct = 0;
                         for (std::uint64_t h = 0; h < N; ++h) {
                             Complex a = 0;
                             for (std::uint64_t x = 0; x < N; ++x) a += f[x] * std::conj(f[g.add(x, h)]);
                             a /= double(N);
                             direct += std::norm(a);
                         }
                         direct /= double(N);
                         const double diff = std::abs(direct - fourier_l4(g, f));
                         o.measured = std::max(o.measured, diff);
                     }
                     o.pass = o.measured <= o.bound;
                     return o;
                 }});
    c.push_back({"4c", "||w^{x^T x}||_{U3} = 1 within 1e-9 for n <= 3; nested = direct sum for n <= 2", [] {
                     Outcome o;
                     o.bound = 1e-9;
                     for (int n = 1; n <= 3; ++n) {
                         GroupSpec g(3, n);
                         auto qt = quad_table(g, FpSymMatrix::identity(3, n));
                         std::vector<Complex> f(g.order());
                         for (std::uint64_t x = 0; x < g.order(); ++x) f[x] = root_of_unity(3, qt[x]);
                         const double u3 = u3_norm(g, f);
                         o.measured = std::max(o.measured, std::abs(u3 - 1));
                         if (n <= 2) {
                             std::array<std::vector<Complex>, 8> fs;
                             fs.fill(f);
                             const Complex direct = gowers_inner(g, fs);
                             o.measured = std::max(o.measured, std::abs(direct - Complex(std::pow(u3, 8), 0)));
                         }
                     }
                     o.pass = o.measured <= o.bound;
                     return o;
                 }});
    c.push_back({"4d", "beta-graphs between trace-factor atoms, n = 8, q = 1: dev2 <= 0.05, density 1/3 +- 0.02", [] {
                     GroupSpec g(3, 8);
                     auto B = trace_factor(8, 3, 0, 1);
                     auto table = label_table(g, B);
                     std::vector<std::vector<std::uint64_t>> atoms(3);
                     for (std::uint64_t x = 0; x < g.order(); ++x) atoms[table[x]].push_back(x);
                     Outcome o;
                     o.bound = 0.05;
                     double dmin = 1, dmax = 0;
                     for (int i = 0; i < 3; ++i)
                         for (int j = i; j < 3; ++j)
                             for (int b = 0; b < 3; ++b) {
                                 auto G = beta_graph(g, B, {b}, atoms[i], atoms[j]);
                                 auto r = dev2_measure(G);
                                 o.measured = std::max(o.measured, r.eps);
                                 dmin = std::min(dmin, r.d2), dmax = std::max(dmax, r.d2);
                             }
                     o.pass = o.measured <= 0.05 && dmin >= 1.0 / 3 - 0.02 && dmax <= 1.0 / 3 + 0.02;
                     o.witness = fmt::format("18 graphs, densities in [{:.4f}, {:.4f}]", dmin, dmax);
                     return o;
                 }});
    c.push_back({"4e", "density transfer for GS(n,3), trace factor (1,1): max difference decreasing over n = 6,7,8 and <= 0.05",
                 [] {
                     std::vector<double> diffs;
                     for (int n = 6; n <= 8; ++n) diffs.push_back(density_transfer_sweep(gs(n, 3), trace_factor(n, 3, 1, 1)).max_diff);
                     Outcome o;
                     o.measured = diffs.back();
                     o.bound = 0.05;
                     o.pass = diffs[0] > diffs[1] && diffs[1] > diffs[2] && diffs[2] <= 0.05;
                     o.witness = fmt::format("max diff {:.5f} {:.5f} {:.5f}", diffs[0], diffs[1], diffs[2]);
                     return o;
                 }});
    c.push_back({"4f", "dev2 and oct contractions equal naive sums (parts <= 20 / <= 8)", [seed] {
                     Rng rng(seed + 2);
                     Outcome o;
                     o.bound = 1e-9;
                     for (int t = 0; t < 20; ++t) {
                         BipartiteGraph G;
                         G.nu = 1 + below(rng, 20);
                         G.nv = 1 + below(rng, 20);
                         const double d = uniform01(rng);
                         G.adj.resize(G.nu * G.nv);
                         for (auto& e : G.adj) e = uniform01(rng) < d;
                         if (G.edges() == 0) G.adj[0] = 1;
                         o.measured = std::max(o.measured, std::abs(dev2_measure(G).eps - naive_dev2(G)));
                     }
                     for (int t = 0; t < 10; ++t) {
                         Tensor3 T;
                         T.nu = 1 + below(rng, 8);
                         T.nv = 1 + below(rng, 8);
                         T.nw = 1 + below(rng, 8);
                         T.f.resize(T.nu * T.nv * T.nw);
                         for (auto& v : T.f) v = 2 * uniform01(rng) - 1;
                         const double a = oct_sum(T), b = naive_oct(T);
                         o.measured = std::max(o.measured, std::abs(a - b) / std::max(1.0, std::abs(b)));
                     }
                     o.pass = o.measured <= o.bound;
                     return o;
                 }});
    c.push_back({"4g", "triad sums lie in B(Sigma): all binary descriptors at n = 5, all ternary at n = 4", [] {
                     Outcome o;
                     o.bound = 0;
                     std::uint64_t tuples = 0, descriptors = 0;
                     try {
                         {
                             GroupSpec g(3, 5);
                             auto B = trace_factor(5, 3, 1, 1);
                             for (std::uint64_t a1 = 0; a1 < 9; ++a1)
                                 for (std::uint64_t a2 = 0; a2 < 9; ++a2)
                                     for (int b = 0; b < 3; ++b) {
                                         TriadDescriptor d{{label_of_code(a1, 1, 1, 3), label_of_code(a2, 1, 1, 3)}, {{b}}};
                                         tuples += check_triad_membership(g, B, d);
                                         ++descriptors;
                                     }
                         }
                         {
                             GroupSpec g(3, 4);
                             auto B = trace_factor(4, 3, 1, 1);
                             for (std::uint64_t a1 = 0; a1 < 9; ++a1)
                                 for (std::uint64_t a2 = 0; a2 < 9; ++a2)
                                     for (std::uint64_t a3 = 0; a3 < 9; ++a3)
                                         for (int pc = 0; pc < 27; ++pc) {
                                             TriadDescriptor d{{label_of_code(a1, 1, 1, 3), label_of_code(a2, 1, 1, 3),
                                                                label_of_code(a3, 1, 1, 3)},
                                                               {{pc % 3}, {pc / 3 % 3}, {pc / 9}}};
                                             tuples += check_triad_membership(g, B, d);
                                             ++descriptors;
                                         }
                         }
                     } catch (const ValidationError& e) {
                         o.measured = 1;
                         o.witness = e.what();
                         return o;
                     }
                     o.pass = true;
                     o.witness = fmt::format("{} descriptors, {} tuples", descriptors, tuples);
                     return o;
                 }});
    c.push_back({"6a", "make_high_rank refines its input and meets the rank target on 50 random factors", [seed] {
                     Rng rng(seed + 3);
                     GroupSpec g(3, 5);
                     Outcome o;
                     o.bound = 0;
                     for (int t = 0; t < 50; ++t) {
                         const int l = below(rng, 3), q = 1 + below(rng, 3);
                         std::vector<FpVector> L;
                         for (int i = 0; i < l; ++i) L.push_back(random_vector(g, rng));
                         std::vector<FpSymMatrix> M;
                         for (int j = 0; j < q; ++j) {
                             // Sparse matrices so that low-rank combinations are common.
                             FpSymMatrix m(3, 5);
                             for (int e = 0; e < 2; ++e) m.set_sym(below(rng, 5), below(rng, 5), below(rng, 3));
                             M.push_back(m);
                         }
                         QuadraticFactor B(3, 5, L, M);
                         RankFunction r(t % 2 ? "x" : "x+1");
                         auto h = make_high_rank(B, r, l + q);
                         const bool ok = refines(g, h.factor, B) && factor_rank(h.factor) >= h.target &&
                                         h.target >= r(h.factor.ell() + h.factor.q()) - 1e-9;
                         if (!ok) {
                             ++o.measured;
                             o.witness = fmt::format("trial {}: rank {} target {}", t, factor_rank(h.factor), h.target);
                         }
                     }
                     o.pass = o.measured == 0;
                     return o;
                 }});
    c.push_back({"6b", "pullback_factor: At(output) = X_R by enumeration on 50 random (B, R), n = 5", [seed] {
                     Rng rng(seed + 4);
                     GroupSpec g(3, 5);
                     Outcome o;
                     o.bound = 0;
                     for (int t = 0; t < 50; ++t) {
                         const int l = below(rng, 3), q = 1 + below(rng, 2);
                         std::vector<FpVector> L;
                         for (int i = 0; i < l; ++i) L.push_back(random_vector(g, rng));
                         std::vector<FpSymMatrix> M;
                         for (int j = 0; j < q; ++j) M.push_back(random_matrix(3, 5, rng));
                         QuadraticFactor B(3, 5, L, M);
                         std::vector<std::vector<int>> R(static_cast<std::size_t>(1 + below(rng, 3)));
                         for (auto& row : R)
                             for (int i = 0; i < l + q; ++i) row.push_back(below(rng, 3));
                         auto pb = pullback_factor(B, R);
                         if (!same_partition(label_table(g, pb.factor), pullback_partition_table(g, B, R))) {
                             ++o.measured;
                             o.witness = fmt::format("trial {} (case {})", t, pb.lemma_case);
                         }
                     }
                     o.pass = o.measured == 0;
                     return o;
                 }});
    c.push_back({"6c", "trace factor (1,1), n = 8: every atom size within (1 +- 3^-2) 3^6", [] {
                     auto sizes = atom_sizes(GroupSpec(3, 8), trace_factor(8, 3, 1, 1));
                     Outcome o;
                     o.bound = 1.0 / 9;
                     for (auto s : sizes) o.measured = std::max(o.measured, std::abs(double(s) / 729.0 - 1));
                     o.pass = o.measured <= o.bound;
                     return o;
                 }});
    return c;
}

// ------------------------------------------------------------- suite closure

std::vector<CheckDef> closure_suite(const SuiteParams& prm) {
    // One fuzzing pass shared by the five checks.
    struct Tally {
        std::uint64_t tested = 0, failed = 0;
        std::string first;
        void add(bool ok, const std::string& what) {
            ++tested;
            if (!ok) {
                ++failed;
                if (first.empty()) first = what;
            }
        }
    };
    auto tallies = std::make_shared<std::vector<Tally>>(5);
    auto done = std::make_shared<bool>(false);
    auto error = std::make_shared<std::string>();
    const std::uint64_t seed = prm.seed;
    auto fuzz = [=] {
        if (*done) return;
        *done = true;
        Rng rng(seed + 5);
        auto& T = *tallies;
        for (int t = 0; t < 200; ++t) {
            const int n = 2 + t % 2;
            GroupSpec g(3, n);
            auto A = random_subset(g, rng, 0.2 + 0.6 * uniform01(rng));
            auto notA = A.complement();
            const std::string tag = fmt::format("set {} (n={})", t, n);
            for (int k : {2, 3}) {
                auto h = find_hop2(A, k);
                if (h.status == SearchStatus::FOUND) {
                    T[0].add(revalidate(hop_complement(h.witness), notA), tag + " hop complement");
                    T[1].add(revalidate(hop_to_op(g, h.witness), A), tag + " hop->op");
                }
            }
            auto f = find_fop2(A, 2);
            if (f.status == SearchStatus::FOUND) {
                T[0].add(revalidate(fop_complement(f.witness), notA), tag + " fop complement");
                T[2].add(revalidate(fop_to_vc(g, f.witness), A), tag + " fop->vc");
            }
            auto v = find_vc2(A, 2);
            if (v.status == SearchStatus::FOUND) T[3].add(revalidate(vc2_to_fop(v.witness), A), tag + " vc2->fop");
            // Intersection with a quadric level set that has no 2-HOP2.
            const int ell = 2 + t % 2;
            if (find_hop2(A, ell).status == SearchStatus::NONE) {
                auto Q = quadric(n, 3, random_matrix(3, n, rng), below(rng, 3));
                if (find_hop2(Q, 2).status == SearchStatus::NONE)
                    T[4].add(find_hop2(A.intersect(Q), ell).status == SearchStatus::NONE, tag + " intersection");
            }
        }
    };
    auto report = [=](int i) {
        fuzz();
        const Tally& t = (*tallies)[static_cast<std::size_t>(i)];
        Outcome o;
        o.measured = double(t.failed);
        o.bound = 0;
        o.pass = t.failed == 0 && t.tested > 0;
        o.witness = fmt::format("{} witnesses transformed", t.tested) + (t.first.empty() ? "" : "; first failure: " + t.first);
        return o;
    };
    return {
        {"5a", "complement transforms (HOP2, FOP2) revalidate on fuzzed witnesses", [=] { return report(0); }},
        {"5b", "HOP2 -> OP transform revalidates", [=] { return report(1); }},
        {"5c", "FOP2 -> shattering transform revalidates", [=] { return report(2); }},
        {"5d", "VC2 -> FOP2 transform revalidates", [=] { return report(3); }},
        {"5e", "no l-HOP2 in A and no 2-HOP2 in B give no l-HOP2 in A cap B", [=] { return report(4); }},
    };
}

// ---------------------------------------------------------- suite regularize

std::vector<CheckDef> regularize_suite(const SuiteParams& prm) {
    const double eps = prm.eps > 0 ? prm.eps : 0.1;
    const std::uint64_t seed = prm.seed;
    auto chains = std::make_shared<std::vector<std::pair<FactorChain, GroupSubset>>>();
    std::vector<CheckDef> c;
    c.push_back({"7a", "unions of <= 3 cosets of codim-2 subgroups of F_3^8: zero error cosets at codim <= 2", [=] {
                     Rng rng(seed + 6);
                     GroupSpec g(3, 8);
                     Outcome o;
                     o.bound = 2;
                     o.pass = true;
                     for (int t = 0; t < 6; ++t) {
                         LinearFactor H0{3, 8, {}};
                         while (true) {
                             H0.vectors = {random_vector(g, rng), random_vector(g, rng)};
                             if (H0.complexity() == 2) break;
                         }
                         std::vector<FpVector> reps;
                         for (int r = 0; r <= t % 3; ++r) reps.push_back(random_vector(g, rng));
                         auto A = union_of_cosets(g, H0, reps);
                         StableParams sp;
                         sp.eps = eps;
                         auto r = stable_linear_decomposition(A, LinearFactor{3, 8, {}}, {}, sp);
                         chains->push_back({r.chain, A});
                         o.measured = std::max<double>(o.measured, r.m);
                         o.witness += fmt::format("{} cosets: m={} errors={}; ", reps.size(), r.m, r.omega.size());
                         if (!r.pass || !r.omega.empty() || r.m > 2) o.pass = false;
                     }
                     return o;
                 }});
    c.push_back({"7b", "find_uniform_dense_coset postconditions on 100 random inputs, n = 8", [=] {
                     Rng rng(seed + 7);
                     GroupSpec g(3, 8);
                     Outcome o;
                     o.bound = 1;
                     o.pass = true;
                     const double epss[3] = {0.2, 0.3, 0.5};
                     for (int t = 0; t < 100; ++t) {
                         const double e = epss[t % 3];
                         GroupSubset A(g);
                         if (t % 4 == 0) {
                             A = random_subset(g, rng, 0.05 + 0.9 * uniform01(rng));
                         } else {
                             LinearFactor L{3, 8, {}};
                             for (int j = 0, cod = 1 + below(rng, 3); j < cod; ++j) L.vectors.push_back(random_vector(g, rng));
                             auto tb = linear_table(g, L);
                             const std::uint32_t pick = static_cast<std::uint32_t>(rng() % 3);
                             for (std::uint64_t x = 0; x < g.order(); ++x)
                                 if (tb[x] % 3 == pick || (t % 4 == 3 && uniform01(rng) < 0.1)) A.insert(x);
                         }
                         LinearFactor H{3, 8, {}};
                         auto r = find_uniform_dense_coset(A, H, e);
                         // Independent recomputation of the three postconditions.
                         auto members = subspace_members(g, r.sub);
                         std::uint64_t hits = 0;
                         for (auto x : members) hits += A.contains(g.add(x, r.y));
                         const double dens = double(hits) / double(members.size());
                         const int cap = static_cast<int>(std::floor(2.0 / e));
                         const bool ok = r.codim <= cap && r.sub.complexity() == r.codim && dens + 1e-12 >= A.density() &&
                                         coset_uniformity(A, r.sub, r.y) <= e + 1e-12;
                         o.measured = std::max(o.measured, double(r.codim) / cap);
                         if (!ok) {
                             o.pass = false;
                             o.witness = fmt::format("input {}: codim {} density {} uniformity {}", t, r.codim, dens, r.uniformity);
                         }
                     }
                     return o;
                 }});
    c.push_back({"7c", "GS(8,3): almost-atomic verdict with error fraction <= 0.2 at some codim <= 6", [=] {
                     auto A = gs(8, 3);
                     StableParams sp;
                     sp.eps = eps;
                     sp.max_codim = 6;
                     auto r = stable_linear_decomposition(A, LinearFactor{3, 8, {}}, {}, sp);
                     chains->push_back({r.chain, A});
                     Outcome o;
                     o.measured = r.error_fraction_by_m.back();
                     o.bound = 0.2;
                     o.pass = r.pass && r.m <= 6 && o.measured <= 0.2;
                     o.witness = fmt::format("m={} error cosets={} bound={:.4f} fractions:", r.m, r.omega.size(), r.omega_bound);
                     for (double f : r.error_fraction_by_m) o.witness += fmt::format(" {:.4f}", f);
                     return o;
                 }});
    c.push_back({"7d", "every emitted factor chain passes factor_chain_check", [=] {
                     Rng rng(seed + 8);
                     GroupSpec g(3, 6);
                     for (int t = 0; t < 10; ++t) {
                         auto A = random_subset(g, rng, uniform01(rng));
                         if (t % 2) A = gs(6, 3).unite(union_of_cosets(g, LinearFactor{3, 6, {random_vector(g, rng)}}, {random_vector(g, rng)}));
                         StableParams sp;
                         sp.eps = eps;
                         chains->push_back({stable_linear_decomposition(A, LinearFactor{3, 6, {}}, {}, sp).chain, A});
                     }
                     Outcome o;
                     o.bound = 0;
                     std::uint64_t steps = 0;
                     for (const auto& [ch, A] : *chains) {
                         auto cc = factor_chain_check(ch, A);
                         steps += static_cast<std::uint64_t>(ch.T());
                         if (!cc.all()) {
                             ++o.measured;
                             o.witness = cc.detail;
                         }
                     }
                     o.pass = o.measured == 0;
                     o.witness = fmt::format("{} chains, {} steps", chains->size(), steps) + (o.witness.empty() ? "" : "; " + o.witness);
                     return o;
                 }});
    return c;
}

// ------------------------------------------------------------ suite appendix

std::vector<CheckDef> appendix_suite(const SuiteParams& prm) {
    std::vector<CheckDef> c;
    c.push_back({"8a", "sparse example: dim span(X) >= |X|^{1/2} for all X in A_8 with |X| <= 8", [] {
                     auto A = sparse_example(8, 3);
                     auto mem = A.members();
                     const GroupSpec& g = A.spec();
                     Outcome o;
                     o.bound = 0;
                     o.measured = 1e9;
                     std::uint64_t subsets = 0;
                     for (std::uint32_t mask = 1; mask < (1U << mem.size()); ++mask) {
                         const int sz = __builtin_popcount(mask);
                         if (sz > 8) continue;
                         std::vector<std::vector<int>> rows;
                         for (std::size_t i = 0; i < mem.size(); ++i)
                             if (mask >> i & 1U) rows.push_back(g.vector_of(mem[i]).coords());
                         ++subsets;
                         const double slack = rank_of_rows(3, rows) - std::sqrt(double(sz));
                         o.measured = std::min(o.measured, slack);
                     }
                     o.pass = o.measured >= 0;
                     o.witness = fmt::format("|A_8| = {}, {} subsets, min slack {:.4f}", mem.size(), subsets, o.measured);
                     return o;
                 }});
    c.push_back({"8b", "affine embeddings: identity found, impossible cases rejected", [] {
                     Outcome o;
                     o.bound = 0;
                     auto A = gs(2, 3), B = gs(3, 3);
                     std::vector<std::string> bad;
                     auto id = affine_embedding_exists(A, A);
                     if (!id.found) bad.push_back("GS(2,3) into itself");
                     if (!affine_embedding_exists(B, B).found) bad.push_back("GS(3,3) into itself");
                     if (!affine_embedding_exists(A, B).found) bad.push_back("GS(2,3) into GS(3,3)");
                     GroupSpec g2(3, 2), g3(3, 3);
                     GroupSubset empty3(g3), full2(g2, [](std::uint64_t) { return true; });
                     if (affine_embedding_exists(full2, empty3).found) bad.push_back("F_3^2 into the empty set");
                     auto q3 = standard_quadric(3, 3, 0);
                     if (affine_embedding_exists(GroupSubset(g3, [](std::uint64_t) { return true; }), q3).found)
                         bad.push_back("F_3^3 into a 9-element quadric");
                     o.measured = double(bad.size());
                     o.pass = bad.empty();
                     for (auto& s : bad) o.witness += s + "; ";
                     return o;
                 }});
    c.push_back({"8c", "tree-encoding count equals the naive count, n = 2, d = 1, 2", [seed = prm.seed] {
                     Rng rng(seed + 9);
                     GroupSpec g(3, 2);
                     Bitset all(g.order());
                     for (std::uint64_t x = 0; x < g.order(); ++x) all.set(x);
                     Outcome o;
                     o.bound = 0;
                     for (int t = 0; t < 6; ++t) {
                         auto A = random_subset(g, rng, 0.2 + 0.6 * uniform01(rng));
                         for (int d = 1; d <= 2; ++d) {
                             const auto fast = count_tree_encodings(A, d, all, all);
                             const auto naive = naive_tree_count(A, d);
                             if (fast != u128(naive)) {
                                 ++o.measured;
                                 o.witness = fmt::format("set {} d {}: {} vs {}", t, d, u128_to_string(fast), naive);
                             }
                         }
                     }
                     o.pass = o.measured == 0;
                     return o;
                 }});
    return c;
}

}  // namespace

std::map<std::string, std::string> SuiteParams::config() const {
    return {{"p", std::to_string(p)},
            {"n", std::to_string(n)},
            {"eps", fmt::format("{}", eps)},
            {"seed", std::to_string(seed)}};
}

SuiteParams SuiteParams::from_config(const std::map<std::string, std::string>& cfg) {
    SuiteParams s;
    try {
        if (auto it = cfg.find("p"); it != cfg.end()) s.p = std::stoi(it->second);
        if (auto it = cfg.find("n"); it != cfg.end()) s.n = std::stoi(it->second);
        if (auto it = cfg.find("eps"); it != cfg.end()) s.eps = std::stod(it->second);
        if (auto it = cfg.find("seed"); it != cfg.end()) s.seed = std::stoull(it->second, nullptr, 0);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad suite parameter: ") + e.what());
    }
    return s;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"gs", "quadric", "qgs", "uniformity", "closure", "regularize", "appendix"};
    return names;
}

SuiteResult run_suite(const std::string& name, const SuiteParams& params) {
    static const std::map<std::string, std::function<std::vector<CheckDef>(const SuiteParams&)>> table = {
        {"gs", gs_suite},         {"quadric", quadric_suite},       {"qgs", qgs_suite},
        {"uniformity", uniformity_suite}, {"closure", closure_suite}, {"regularize", regularize_suite},
        {"appendix", appendix_suite}};
    auto it = table.find(name);
    if (it == table.end()) throw UsageError("unknown suite '" + name + "'");
    if (params.p != 3) throw UsageError("suites are defined at p = 3");
    if (params.n < 0 || params.n > 4) throw UsageError("suite size n must lie in [0, 4]");
    if (params.eps < 0 || params.eps >= 0.5) throw UsageError("eps must lie in [0, 0.5)");
    SuiteResult res;
    res.suite = name;
    res.config = params.config();
    auto defs = it->second(params);
    res.checks.resize(defs.size());
    // Checks sharing state (closure, regularize chains) must run in catalogue order.
    const bool ordered = name == "closure" || name == "regularize";
    auto run_one = [&](std::size_t i) {
        CheckResult& r = res.checks[i];
        r.id = defs[i].id;
        r.anchor = defs[i].anchor;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            Outcome o = defs[i].run();
            r.status = o.pass ? CheckStatus::PASS : CheckStatus::FAIL;
            r.measured = std::isfinite(o.measured) ? o.measured : 0;
            r.bound = o.bound;
            r.witness = o.witness;
        } catch (const std::exception& e) {
            r.status = CheckStatus::ERROR;
            r.witness = e.what();
        }
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    };
    if (ordered)
        for (std::size_t i = 0; i < defs.size(); ++i) run_one(i);
    else
        tbb::parallel_for(std::size_t{0}, defs.size(), run_one);
    return res;
}

}  // namespace qfa
