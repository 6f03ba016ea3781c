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

#include "qfa/uniformity.hpp"

#include <tbb/parallel_for.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>

namespace qfa {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_size(const GroupSpec& g, const std::vector<Complex>& f) {
    if (f.size() != g.order()) throw ShapeError("function table size does not match the group");
}

double sum_fourth(const std::vector<Complex>& fh) {
    double s = 0, c = 0;
    for (const auto& z : fh) {
        double t = std::norm(z);
        t *= t;
        double y = s + t;
        c += std::abs(s) >= std::abs(t) ? (s - y) + t : (t - y) + s;
        s = y;
    }
    return s + c;
}

std::vector<std::uint64_t> mx_table(const GroupSpec& g, const FpSymMatrix& M) { return apply_table(g, M); }

}  // namespace

// ------------------------------------------------------------------ norms

std::vector<Complex> to_complex(const std::vector<double>& f) { return {f.begin(), f.end()}; }

std::vector<double> indicator(const GroupSubset& A) {
    std::vector<double> f(A.spec().order(), 0.0);
    for (auto x : A.members()) f[x] = 1.0;
    return f;
}

std::vector<double> balanced(const GroupSubset& A) {
    auto f = indicator(A);
    const double d = A.density();
    for (auto& v : f) v -= d;
    return f;
}

double fourier_l4(const GroupSpec& g, const std::vector<Complex>& f) {
    check_size(g, f);
    return sum_fourth(dft(g, f));
}

double fourier_linf(const GroupSpec& g, const std::vector<Complex>& f) {
    check_size(g, f);
    double m = 0;
    for (const auto& z : dft(g, f)) m = std::max(m, std::abs(z));
    return m;
}

double u2_norm(const GroupSpec& g, const std::vector<Complex>& f) {
    return std::pow(std::max(0.0, fourier_l4(g, f)), 0.25);
}

double u3_norm(const GroupSpec& g, const std::vector<Complex>& f) {
    check_size(g, f);
    const std::uint64_t N = g.order();
    if (N > 19683) throw CapacityError("u3_norm: group larger than 3^9 elements");
    std::vector<double> per(N);
    tbb::parallel_for(std::uint64_t{0}, N, [&](std::uint64_t c) {
        std::vector<Complex> d(N);
        for (std::uint64_t x = 0; x < N; ++x) d[x] = f[x] * std::conj(f[g.add(x, c)]);
        per[c] = sum_fourth(dft(g, d));
    });
    double s = 0;
    for (double v : per) s += v;
    return std::pow(std::max(0.0, s / static_cast<double>(N)), 0.125);
}

Complex gowers_inner(const GroupSpec& g, const std::array<std::vector<Complex>, 8>& f) {
    for (const auto& fi : f) check_size(g, fi);
    const std::uint64_t N = g.order();
    if (N > 256) throw CapacityError("gowers_inner: direct summation limited to 256 elements");
    std::vector<Complex> per(N);
    tbb::parallel_for(std::uint64_t{0}, N, [&](std::uint64_t x) {
        Complex acc = 0;
        for (std::uint64_t a = 0; a < N; ++a) {
            const std::uint64_t xa = g.add(x, a);
            for (std::uint64_t b = 0; b < N; ++b) {
                const std::uint64_t xb = g.add(x, b), xab = g.add(xa, b);
                const Complex p0 = f[0][x] * std::conj(f[1][xa]) * std::conj(f[2][xb]) * f[3][xab];
                for (std::uint64_t c = 0; c < N; ++c) {
                    const Complex p1 = std::conj(f[4][g.add(x, c)]) * f[5][g.add(xa, c)] * f[6][g.add(xb, c)] *
                                       std::conj(f[7][g.add(xab, c)]);
                    acc += p0 * p1;
                }
            }
        }
        per[x] = acc;
    });
    Complex s = 0;
    for (const auto& v : per) s += v;
    const double n4 = static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(N) * static_cast<double>(N);
    return s / n4;
}

// ----------------------------------------------------------------- triads

AtomLabel sigma(const TriadDescriptor& d, int p) {
    if (d.atoms.size() != 2 && d.atoms.size() != 3) throw ShapeError("sigma: descriptor needs 2 or 3 atoms");
    const std::size_t want_pairs = d.atoms.size() == 2 ? 1 : 3;
    if (d.pairs.size() != want_pairs) throw ShapeError("sigma: wrong number of pair values");
    AtomLabel s{std::vector<int>(d.atoms[0].a.size(), 0), std::vector<int>(d.atoms[0].b.size(), 0)};
    for (const auto& at : d.atoms) {
        if (at.a.size() != s.a.size() || at.b.size() != s.b.size()) throw ShapeError("sigma: label lengths differ");
        for (std::size_t i = 0; i < s.a.size(); ++i) s.a[i] = (s.a[i] + at.a[i]) % p;
        for (std::size_t i = 0; i < s.b.size(); ++i) s.b[i] = (s.b[i] + at.b[i]) % p;
    }
    for (const auto& pr : d.pairs) {
        if (pr.size() != s.b.size()) throw ShapeError("sigma: pair value length differs from q");
        for (std::size_t i = 0; i < s.b.size(); ++i) s.b[i] = (s.b[i] + 2 * pr[i]) % p;
    }
    return s;
}

std::uint64_t BipartiteGraph::edges() const {
    std::uint64_t e = 0;
    for (char c : adj) e += c != 0;
    return e;
}

BipartiteGraph beta_graph(const GroupSpec& g, const QuadraticFactor& B, const std::vector<int>& b,
                          const std::vector<std::uint64_t>& X, const std::vector<std::uint64_t>& Y) {
    if (static_cast<int>(b.size()) != B.q()) throw ShapeError("beta_graph: pair value length differs from q");
    BipartiteGraph G;
    G.nu = X.size();
    G.nv = Y.size();
    G.adj.assign(G.nu * G.nv, 1);
    for (int i = 0; i < B.q(); ++i) {
        auto mx = mx_table(g, B.quadratic()[i]);
        const int bi = ((b[i] % g.p()) + g.p()) % g.p();
        for (std::size_t u = 0; u < G.nu; ++u)
            for (std::size_t v = 0; v < G.nv; ++v)
                if (G.adj[u * G.nv + v] && g.dot(mx[X[u]], Y[v]) != bi) G.adj[u * G.nv + v] = 0;
    }
    return G;
}

Triad build_triad(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d) {
    (void)sigma(d, g.p());  // shape validation
    Triad t;
    for (const auto& at : d.atoms) t.parts.push_back(atom_members(g, B, at).members());
    if (!d.ternary()) {
        t.graphs.push_back(beta_graph(g, B, d.pairs[0], t.parts[0], t.parts[1]));
    } else {
        t.graphs.push_back(beta_graph(g, B, d.pairs[0], t.parts[0], t.parts[1]));
        t.graphs.push_back(beta_graph(g, B, d.pairs[1], t.parts[0], t.parts[2]));
        t.graphs.push_back(beta_graph(g, B, d.pairs[2], t.parts[1], t.parts[2]));
    }
    return t;
}

std::vector<BipartiteGraph> triad_graphs(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d) {
    return build_triad(g, B, d).graphs;
}

namespace {

// Calls fn(u, v, w) for every triangle of a ternary triad.
template <class Fn>
void for_each_triangle(const Triad& t, Fn fn) {
    const auto &g01 = t.graphs[0], &g02 = t.graphs[1], &g12 = t.graphs[2];
    for (std::size_t u = 0; u < g01.nu; ++u)
        for (std::size_t v = 0; v < g01.nv; ++v) {
            if (!g01.edge(u, v)) continue;
            for (std::size_t w = 0; w < g02.nv; ++w)
                if (g02.edge(u, w) && g12.edge(v, w)) fn(u, v, w);
        }
}

std::uint64_t code_of(const AtomLabel& l, int p) { return label_code(l, p); }

}  // namespace

std::uint64_t check_triad_membership(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d) {
    const auto labels = label_table(g, B);
    const std::uint64_t want = code_of(sigma(d, g.p()), g.p());
    Triad t = build_triad(g, B, d);
    std::uint64_t checked = 0;
    if (!d.ternary()) {
        for (std::size_t u = 0; u < t.graphs[0].nu; ++u)
            for (std::size_t v = 0; v < t.graphs[0].nv; ++v) {
                if (!t.graphs[0].edge(u, v)) continue;
                ++checked;
                if (labels[g.add(t.parts[0][u], t.parts[1][v])] != want)
                    throw ValidationError("edge sum outside B(sigma)");
            }
        return checked;
    }
    for_each_triangle(t, [&](std::size_t u, std::size_t v, std::size_t w) {
        ++checked;
        if (labels[g.add(g.add(t.parts[0][u], t.parts[1][v]), t.parts[2][w])] != want)
            throw ValidationError("triangle sum outside B(sigma)");
    });
    return checked;
}

// --------------------------------------------------------- quasirandomness

Dev2Result dev2_measure(const BipartiteGraph& G) {
    Dev2Result r;
    if (G.nu == 0 || G.nv == 0) return r;
    const double cells = static_cast<double>(G.nu) * static_cast<double>(G.nv);
    const std::uint64_t E = G.edges();
    r.d2 = static_cast<double>(E) / cells;
    // Codegree form over the smaller side: with g = adj - d, the inner sum for rows (s, t) is
    // c(s,t) - d (deg s + deg t) + d^2 m, where c is the common-neighbour count.
    const bool rows_u = G.nu <= G.nv;
    const std::size_t n = rows_u ? G.nu : G.nv, m = rows_u ? G.nv : G.nu;
    std::vector<Bitset> rows(n, Bitset(m));
    for (std::size_t u = 0; u < G.nu; ++u)
        for (std::size_t v = 0; v < G.nv; ++v)
            if (G.edge(u, v)) rows_u ? rows[u].set(v) : rows[v].set(u);
    std::vector<double> deg(n);
    for (std::size_t s = 0; s < n; ++s) deg[s] = static_cast<double>(rows[s].count());
    const double d = r.d2, dm = d * d * static_cast<double>(m);
    double total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        double acc = 0;
        for (std::size_t t = s; t < n; ++t) {
            const double c = static_cast<double>(rows[s].and_count(rows[t]));
            const double x = c - d * (deg[s] + deg[t]) + dm;
            acc += t == s ? x * x : 2.0 * x * x;
        }
        total += acc;
    }
    r.eps = total / (cells * cells);
    return r;
}

double oct_sum(const Tensor3& t) {
    if (t.f.size() != t.nu * t.nv * t.nw) throw ShapeError("oct_sum: tensor size mismatch");
    if (t.nu == 0 || t.nv == 0 || t.nw == 0) return 0.0;
    const auto nv = static_cast<Eigen::Index>(t.nv), nw = static_cast<Eigen::Index>(t.nw);
    std::vector<double> per(t.nu, 0.0);
    tbb::parallel_for(std::size_t{0}, t.nu, [&](std::size_t u0) {
        Eigen::Map<const RowMat> f0(t.f.data() + u0 * t.nv * t.nw, nv, nw);
        double acc = 0;
        for (std::size_t u1 = u0; u1 < t.nu; ++u1) {
            Eigen::Map<const RowMat> f1(t.f.data() + u1 * t.nv * t.nw, nv, nw);
            RowMat P = f0.cwiseProduct(f1);
            double s = (P * P.transpose()).squaredNorm();
            acc += u1 == u0 ? s : 2.0 * s;
        }
        per[u0] = acc;
    });
    double s = 0;
    for (double v : per) s += v;
    return s;
}

std::uint64_t triangle_count(const Triad& t) {
    if (t.parts.size() != 3) throw ShapeError("triangle_count: ternary triad required");
    std::uint64_t c = 0;
    for_each_triangle(t, [&](std::size_t, std::size_t, std::size_t) { ++c; });
    return c;
}

bool Dev23Result::has(double e1, double e2) const { return eps2 <= e2 && d2_spread < e2 && eps1 <= e1 && d2 > 0; }

Dev23Result dev23_measure(const Triad& t, const GroupSubset& A) {
    if (t.parts.size() != 3) throw ShapeError("dev23_measure: ternary triad required");
    const GroupSpec& g = A.spec();
    Dev23Result r;
    double dij[3];
    for (int i = 0; i < 3; ++i) {
        auto d = dev2_measure(t.graphs[i]);
        dij[i] = d.d2;
        r.eps2 = std::max(r.eps2, d.eps);
    }
    r.d2 = (dij[0] + dij[1] + dij[2]) / 3.0;
    for (double d : dij) r.d2_spread = std::max(r.d2_spread, std::abs(d - r.d2));
    std::uint64_t hyper = 0;
    Tensor3 h{t.parts[0].size(), t.parts[1].size(), t.parts[2].size(), {}};
    h.f.assign(h.nu * h.nv * h.nw, 0.0);
    std::vector<std::size_t> tri;
    std::vector<char> in;
    for_each_triangle(t, [&](std::size_t u, std::size_t v, std::size_t w) {
        ++r.triangles;
        bool e = A.contains(g.add(g.add(t.parts[0][u], t.parts[1][v]), t.parts[2][w]));
        hyper += e;
        tri.push_back((u * h.nv + v) * h.nw + w);
        in.push_back(e);
    });
    if (r.triangles == 0) return r;
    r.d3 = static_cast<double>(hyper) / static_cast<double>(r.triangles);
    for (std::size_t i = 0; i < tri.size(); ++i) h.f[tri[i]] = in[i] ? 1.0 - r.d3 : -r.d3;
    r.oct = oct_sum(h);
    const double vol = std::pow(static_cast<double>(h.nu) * static_cast<double>(h.nv) * static_cast<double>(h.nw), 2.0);
    r.eps1 = r.d2 > 0 ? r.oct / (std::pow(r.d2, 12) * vol) : 0.0;
    return r;
}

double oct_measure(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d, const GroupSubset& A) {
    if (!d.ternary()) throw ShapeError("oct_measure: ternary descriptor required");
    Triad t = build_triad(g, B, d);
    const auto target = atom_members(g, B, sigma(d, g.p()));
    const double alpha = target.size() ? static_cast<double>(target.intersect(A).size()) / static_cast<double>(target.size()) : 0.0;
    Tensor3 f{t.parts[0].size(), t.parts[1].size(), t.parts[2].size(), {}};
    f.f.assign(f.nu * f.nv * f.nw, 0.0);
    for_each_triangle(t, [&](std::size_t u, std::size_t v, std::size_t w) {
        bool e = A.contains(g.add(g.add(t.parts[0][u], t.parts[1][v]), t.parts[2][w]));
        f.f[(u * f.nv + v) * f.nw + w] = (e ? 1.0 : 0.0) - alpha;
    });
    return oct_sum(f);
}

MeasureReport density_transfer_check(const GroupSubset& A, const QuadraticFactor& B, const TriadDescriptor& d,
                                     double bound) {
    const GroupSpec& g = A.spec();
    Triad t = build_triad(g, B, d);
    std::uint64_t total = 0, hits = 0;
    if (!d.ternary()) {
        for (std::size_t u = 0; u < t.graphs[0].nu; ++u)
            for (std::size_t v = 0; v < t.graphs[0].nv; ++v)
                if (t.graphs[0].edge(u, v)) {
                    ++total;
                    hits += A.contains(g.add(t.parts[0][u], t.parts[1][v]));
                }
    } else {
        for_each_triangle(t, [&](std::size_t u, std::size_t v, std::size_t w) {
            ++total;
            hits += A.contains(g.add(g.add(t.parts[0][u], t.parts[1][v]), t.parts[2][w]));
        });
    }
    const auto target = atom_members(g, B, sigma(d, g.p()));
    MeasureReport r;
    r.name = d.ternary() ? "density-transfer-3" : "density-transfer-2";
    r.bound = bound;
    r.bound_formula = "given threshold";
    if (total == 0) {
        r.pass = true;
        r.detail = "empty triad";
        return r;
    }
    const double rel = static_cast<double>(hits) / static_cast<double>(total);
    const double alpha = target.size() ? static_cast<double>(target.intersect(A).size()) / static_cast<double>(target.size()) : 0.0;
    r.measured = std::abs(rel - alpha);
    r.pass = r.measured <= bound;
    r.detail = "relative density " + std::to_string(rel) + ", density on B(sigma) " + std::to_string(alpha);
    return r;
}

TransferSweep density_transfer_sweep(const GroupSubset& A, const QuadraticFactor& B) {
    const GroupSpec& g = A.spec();
    const int p = g.p(), L = static_cast<int>(B.linear().size()), Q = B.q();
    const auto labels = label_table(g, B);
    const std::uint64_t S = label_space_size(B);
    std::uint64_t PQ = 1;
    for (int i = 0; i < Q; ++i) PQ *= static_cast<std::uint64_t>(p);
    if (S * S * PQ > (std::uint64_t{1} << 26)) throw CapacityError("density_transfer_sweep: too many descriptors");
    std::vector<std::vector<std::uint64_t>> mx;
    for (const auto& M : B.quadratic()) mx.push_back(mx_table(g, M));
    const std::uint64_t N = g.order();
    const std::size_t D = static_cast<std::size_t>(S * S * PQ);
    // Per-x accumulation, merged in order for determinism.
    std::vector<std::uint64_t> edges(D, 0), hits(D, 0);
    const std::uint64_t chunk = 256;
    const std::uint64_t chunks = (N + chunk - 1) / chunk;
    std::vector<std::vector<std::uint64_t>> pe(chunks), ph(chunks);
    tbb::parallel_for(std::uint64_t{0}, chunks, [&](std::uint64_t c) {
        std::vector<std::uint64_t> e(D, 0), h(D, 0);
        for (std::uint64_t x = c * chunk; x < std::min(N, (c + 1) * chunk); ++x)
            for (std::uint64_t y = 0; y < N; ++y) {
                std::uint64_t bcode = 0, mult = 1;
                for (int i = 0; i < Q; ++i) {
                    bcode += static_cast<std::uint64_t>(g.dot(mx[i][x], y)) * mult;
                    mult *= static_cast<std::uint64_t>(p);
                }
                const std::size_t idx = static_cast<std::size_t>((labels[x] * S + labels[y]) * PQ + bcode);
                ++e[idx];
                h[idx] += A.contains(g.add(x, y));
            }
        pe[c] = std::move(e);
        ph[c] = std::move(h);
    });
    for (std::uint64_t c = 0; c < chunks; ++c)
        for (std::size_t i = 0; i < D; ++i) edges[i] += pe[c][i], hits[i] += ph[c][i];
    std::vector<std::uint64_t> atom_size(S, 0), atom_hits(S, 0);
    for (std::uint64_t x = 0; x < N; ++x) {
        ++atom_size[labels[x]];
        atom_hits[labels[x]] += A.contains(x);
    }
    TransferSweep r;
    double wsum = 0, wtot = 0;
    for (std::size_t i = 0; i < D; ++i) {
        if (edges[i] == 0) continue;
        const std::uint64_t bcode = i % PQ, l2 = (i / PQ) % S, l1 = i / PQ / S;
        TriadDescriptor d;
        d.atoms = {label_of_code(l1, L, Q, p), label_of_code(l2, L, Q, p)};
        d.pairs = {label_of_code(bcode, 0, Q, p).b};
        const std::uint64_t s = code_of(sigma(d, p), p);
        const double alpha = atom_size[s] ? static_cast<double>(atom_hits[s]) / static_cast<double>(atom_size[s]) : 0.0;
        const double diff = std::abs(static_cast<double>(hits[i]) / static_cast<double>(edges[i]) - alpha);
        ++r.descriptors;
        wsum += diff * static_cast<double>(edges[i]);
        wtot += static_cast<double>(edges[i]);
        if (diff > r.max_diff) {
            r.max_diff = diff;
            r.worst = d;
        }
    }
    r.mean_diff = wtot > 0 ? wsum / wtot : 0.0;
    return r;
}

std::uint64_t k222_count(const Triad& t, std::size_t u0, std::size_t v0, std::size_t w0) {
    if (t.parts.size() != 3) throw ShapeError("k222_count: ternary triad required");
    const auto &g01 = t.graphs[0], &g02 = t.graphs[1], &g12 = t.graphs[2];
    if (u0 >= g01.nu || v0 >= g01.nv || w0 >= g02.nv) throw RangeError("k222_count: base triple out of range");
    std::uint64_t c = 0;
    for (std::size_t u1 = 0; u1 < g01.nu; ++u1) {
        if (!g01.edge(u1, v0) || !g02.edge(u1, w0)) continue;
        for (std::size_t v1 = 0; v1 < g01.nv; ++v1) {
            if (!g01.edge(u0, v1) || !g01.edge(u1, v1) || !g12.edge(v1, w0)) continue;
            for (std::size_t w1 = 0; w1 < g02.nv; ++w1)
                if (g02.edge(u0, w1) && g02.edge(u1, w1) && g12.edge(v0, w1) && g12.edge(v1, w1)) ++c;
        }
    }
    // Base corner (u0, v0, w0) itself must be a triangle for the count to be meaningful.
    if (!(g01.edge(u0, v0) && g02.edge(u0, w0) && g12.edge(v0, w0))) return 0;
    return c;
}

MeasureReport hom_count_check(const Triad& t, double tol) {
    MeasureReport r;
    r.name = "triangle-count";
    const double sizes = static_cast<double>(t.parts[0].size()) * static_cast<double>(t.parts[1].size()) *
                         static_cast<double>(t.parts[2].size());
    double pred = sizes;
    for (const auto& G : t.graphs) pred *= G.nu && G.nv ? static_cast<double>(G.edges()) / (static_cast<double>(G.nu) * static_cast<double>(G.nv)) : 0.0;
    const double count = static_cast<double>(triangle_count(t));
    r.measured = pred > 0 ? count / pred : 0.0;
    r.bound = tol;
    r.bound_formula = "|count / (d12 d13 d23 |V1||V2||V3|) - 1| <= tol";
    r.pass = pred > 0 && std::abs(r.measured - 1.0) <= tol;
    r.detail = "count " + std::to_string(static_cast<std::uint64_t>(count)) + ", predicted " + std::to_string(pred);
    return r;
}

// ----------------------------------------------------------- reduced pairs

ReducedPair reduced_pair(const GroupSubset& A, const QuadraticFactor& B, double eps) {
    const GroupSpec& g = A.spec();
    if (!(eps >= 0 && eps < 0.5)) throw RangeError("reduced_pair: eps must lie in [0, 1/2)");
    ReducedPair r;
    r.factor = B;
    r.eps = eps;
    const int L = static_cast<int>(B.linear().size());
    const int dims = B.label_dims();
    if (dims == 0) throw ValidationError("reduced_pair: factor has no label coordinates");
    r.labels = GroupSpec(g.p(), dims);
    const std::uint64_t S = r.labels.order();
    const auto lt = label_table(g, B);
    r.size.assign(S, 0);
    std::vector<std::uint64_t> hits(S, 0);
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        ++r.size[lt[x]];
        hits[lt[x]] += A.contains(x);
    }
    r.A1 = Bitset(S);
    r.A0 = Bitset(S);
    r.err = Bitset(S);
    r.HB = Bitset(S);
    r.density.assign(S, 0.0);
    std::uint64_t pl = 1;
    for (int i = 0; i < L; ++i) pl *= static_cast<std::uint64_t>(g.p());
    for (std::uint64_t c = 0; c < S; ++c) {
        if (c % pl == 0) r.HB.set(c);
        if (r.size[c] == 0) {
            r.err.set(c);  // empty atom: no density
            continue;
        }
        // Integer comparisons: hits >= (1 - eps) size and hits <= eps size.
        const double sz = static_cast<double>(r.size[c]), h = static_cast<double>(hits[c]);
        r.density[c] = h / sz;
        if (h >= (1.0 - eps) * sz)
            r.A1.set(c);
        else if (h <= eps * sz)
            r.A0.set(c);
        else
            r.err.set(c);
    }
    return r;
}

SearchResult find_good_copy(const ReducedPair& red, CopyPattern pattern, int k, bool right_in_HB,
                            const SearchBudget& budget) {
    return find_good_copy(red.labels, red.A1, red.A0, pattern, k, right_in_HB ? &red.HB : nullptr, budget);
}

MeasureReport hypergraph_decomposition_check(const GroupSubset& A, const QuadraticFactor& B, double eps1, double eps2,
                                             std::size_t max_triads, std::size_t samples, std::uint64_t seed) {
    const GroupSpec& g = A.spec();
    const int p = g.p(), L = static_cast<int>(B.linear().size()), Q = B.q();
    const std::uint64_t S = label_space_size(B);
    std::uint64_t PQ = 1;
    for (int i = 0; i < Q; ++i) PQ *= static_cast<std::uint64_t>(p);
    const double total_triads = std::pow(static_cast<double>(S), 3) * std::pow(static_cast<double>(PQ), 3);
    const auto lt = label_table(g, B);
    std::vector<std::vector<std::uint64_t>> mx;
    for (const auto& M : B.quadratic()) mx.push_back(mx_table(g, M));
    auto bvec = [&](std::uint64_t x, std::uint64_t y) {
        std::vector<int> b(static_cast<std::size_t>(Q));
        for (int i = 0; i < Q; ++i) b[i] = g.dot(mx[i][x], y);
        return b;
    };
    auto passes = [&](const TriadDescriptor& d, std::uint64_t& weight) {
        Triad t = build_triad(g, B, d);
        auto r = dev23_measure(t, A);
        weight = r.triangles;
        return r.has(eps1, eps2);
    };
    MeasureReport rep;
    rep.name = "hypergraph-decomposition";
    rep.bound = eps1;
    rep.bound_formula = "fraction of triples outside dev23(eps1, eps2) triads <= eps1";
    if (total_triads <= static_cast<double>(max_triads)) {
        double good = 0;
        const std::uint64_t T = static_cast<std::uint64_t>(total_triads);
        for (std::uint64_t c = 0; c < T; ++c) {
            std::uint64_t r = c;
            TriadDescriptor d;
            for (int i = 0; i < 3; ++i) d.atoms.push_back(label_of_code(r % S, L, Q, p)), r /= S;
            for (int i = 0; i < 3; ++i) d.pairs.push_back(label_of_code(r % PQ, 0, Q, p).b), r /= PQ;
            std::uint64_t w = 0;
            if (passes(d, w)) good += static_cast<double>(w);
        }
        const double all = std::pow(static_cast<double>(g.order()), 3);
        rep.measured = 1.0 - good / all;
        rep.detail = "exhaustive over " + std::to_string(T) + " triads";
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::uint64_t> pick(0, g.order() - 1);
        std::map<std::vector<std::uint64_t>, bool> cache;
        std::size_t good = 0;
        for (std::size_t s = 0; s < samples; ++s) {
            const std::uint64_t x = pick(rng), y = pick(rng), z = pick(rng);
            TriadDescriptor d;
            d.atoms = {label_of_code(lt[x], L, Q, p), label_of_code(lt[y], L, Q, p), label_of_code(lt[z], L, Q, p)};
            d.pairs = {bvec(x, y), bvec(x, z), bvec(y, z)};
            std::vector<std::uint64_t> key = {lt[x], lt[y], lt[z]};
            for (const auto& pr : d.pairs)
                for (int v : pr) key.push_back(static_cast<std::uint64_t>(v));
            auto it = cache.find(key);
            if (it == cache.end()) {
                std::uint64_t w = 0;
                it = cache.emplace(key, passes(d, w)).first;
            }
            good += it->second;
        }
        rep.measured = 1.0 - static_cast<double>(good) / static_cast<double>(samples);
        rep.detail = "sampled " + std::to_string(samples) + " triples over " + std::to_string(cache.size()) + " triads";
    }
    rep.pass = rep.measured <= eps1;
    return rep;
}

}  // namespace qfa
