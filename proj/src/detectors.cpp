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

#include "qfa/detectors.hpp"

#include <algorithm>

#include "search_engine.hpp"

namespace qfa {

std::string to_string(WitnessKind k) {
    switch (k) {
        case WitnessKind::OP: return "OP";
        case WitnessKind::HOP2: return "HOP2";
        case WitnessKind::FOP2: return "FOP2";
        case WitnessKind::VC: return "VC";
        case WitnessKind::VC2: return "VC2";
        case WitnessKind::TREE: return "TREE";
        case WitnessKind::GOODCOPY: return "GOODCOPY";
    }
    return "?";
}

std::string to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::FOUND: return "FOUND";
        case SearchStatus::NONE: return "NONE";
        case SearchStatus::BOUND_ONLY: return "BOUND_ONLY";
    }
    return "?";
}

const std::vector<std::uint64_t>& Witness::role(const std::string& name) const {
    for (std::size_t i = 0; i < role_names.size(); ++i)
        if (role_names[i] == name) return roles[i];
    throw ValidationError("witness has no role '" + name + "'");
}

// ------------------------------------------------------------ revalidation
//
// Deliberately written against FpVector arithmetic rather than the index tables used by the searches.

namespace {

struct Vecs {
    const GroupSpec& g;
    FpVector at(std::uint64_t i) const { return g.vector_of(i); }
    std::uint64_t idx(const FpVector& v) const { return g.index_of(v); }
};

bool in_set(const GroupSubset& A, const FpVector& v) { return A.contains(v); }

int ipow(int b, int e) {
    int r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

bool check_sizes(const Witness& w, const std::vector<std::size_t>& sizes) {
    if (w.roles.size() != sizes.size()) return false;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        if (w.roles[i].size() != sizes[i]) return false;
    return true;
}

}  // namespace

bool revalidate(const Witness& w, const GroupSubset& A) {
    const GroupSpec& g = A.spec();
    Vecs V{g};
    const int k = w.k;
    if (k < 0) return false;
    for (const auto& r : w.roles)
        for (auto x : r)
            if (x >= g.order()) return false;
    switch (w.kind) {
        case WitnessKind::OP: {
            if (!check_sizes(w, {std::size_t(k), std::size_t(k)})) return false;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    if (in_set(A, V.at(w.roles[0][i]) + V.at(w.roles[1][j])) != (i <= j)) return false;
            return true;
        }
        case WitnessKind::HOP2: {
            if (!check_sizes(w, {std::size_t(k), std::size_t(k), std::size_t(k)})) return false;
            for (int u = 1; u <= k; ++u)
                for (int v = 1; v <= k; ++v)
                    for (int x = 1; x <= k; ++x) {
                        FpVector s = V.at(w.roles[0][u - 1]) + V.at(w.roles[1][v - 1]) + V.at(w.roles[2][x - 1]);
                        if (in_set(A, s) != (u < v + x)) return false;
                    }
            return true;
        }
        case WitnessKind::FOP2: {
            if (k < 1 || k * k > 16) return false;
            const std::size_t nf = static_cast<std::size_t>(ipow(k, k * k));
            if (!check_sizes(w, {std::size_t(k), std::size_t(k), nf * std::size_t(k)})) return false;
            const auto &x = w.roles[0], &z = w.roles[1], &y = w.roles[2];
            for (std::size_t f = 0; f < nf; ++f) {
                std::vector<int> fv(static_cast<std::size_t>(k * k));
                std::size_t c = f;
                for (int t = 0; t < k * k; ++t) fv[t] = static_cast<int>(c % static_cast<std::size_t>(k)) + 1, c /= static_cast<std::size_t>(k);
                for (int i = 1; i <= k; ++i)
                    for (int j = 1; j <= k; ++j)
                        for (int s = 1; s <= k; ++s) {
                            FpVector sum = V.at(x[i - 1]) + V.at(y[f * static_cast<std::size_t>(k) + static_cast<std::size_t>(j - 1)]) + V.at(z[s - 1]);
                            if (in_set(A, sum) != (s <= fv[(i - 1) * k + (j - 1)])) return false;
                        }
            }
            return true;
        }
        case WitnessKind::VC: {
            if (k > 20) return false;
            if (!check_sizes(w, {std::size_t(k), std::size_t(1) << k})) return false;
            for (std::size_t S = 0; S < (std::size_t(1) << k); ++S)
                for (int i = 0; i < k; ++i)
                    if (in_set(A, V.at(w.roles[0][i]) + V.at(w.roles[1][S])) != bool((S >> i) & 1U)) return false;
            return true;
        }
        case WitnessKind::VC2: {
            if (k * k > 20) return false;
            if (!check_sizes(w, {std::size_t(k), std::size_t(k), std::size_t(1) << (k * k)})) return false;
            for (std::size_t S = 0; S < (std::size_t(1) << (k * k)); ++S)
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j) {
                        FpVector s = V.at(w.roles[0][i]) + V.at(w.roles[1][j]) + V.at(w.roles[2][S]);
                        if (in_set(A, s) != bool((S >> (i * k + j)) & 1U)) return false;
                    }
            return true;
        }
        case WitnessKind::TREE: {
            const int d = k;
            if (d < 1 || d > 20) return false;
            const std::size_t leaves = std::size_t(1) << d;
            if (!check_sizes(w, {leaves - 1, leaves})) return false;
            for (std::size_t eta = 0; eta < leaves; ++eta)
                for (int len = 0; len < d; ++len) {
                    // sigma = first len bits of eta (most significant first); the next bit decides the side.
                    std::size_t sigma = eta >> (d - len);
                    bool bit = (eta >> (d - len - 1)) & 1U;
                    std::size_t node = (std::size_t(1) << len) - 1 + sigma;
                    if (in_set(A, V.at(w.roles[0][node]) + V.at(w.roles[1][eta])) != bit) return false;
                }
            return true;
        }
        case WitnessKind::GOODCOPY: return false;  // needs the reduced pair; see revalidate_good_copy
    }
    return false;
}

bool revalidate_good_copy(const Witness& w, const GroupSpec& labels, const Bitset& A1, const Bitset& A0,
                          const Bitset* side) {
    Vecs V{labels};
    const int k = w.k;
    if (w.roles.size() != 2) return false;
    const auto &a = w.roles[0], &b = w.roles[1];
    if (static_cast<int>(a.size()) != k) return false;
    for (const auto& r : w.roles)
        for (auto x : r)
            if (x >= labels.order()) return false;
    if (side)
        for (auto x : b)
            if (!side->test(x)) return false;
    const bool u_pattern = b.size() == (std::size_t(1) << k) && w.role_names.size() == 2 && w.role_names[1] == "bS";
    if (!u_pattern && static_cast<int>(b.size()) != k) return false;
    for (int i = 0; i < k; ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto s = V.idx(V.at(a[i]) + V.at(b[j]));
            bool want = u_pattern ? bool((j >> i) & 1U) : (i <= static_cast<int>(j));
            if (!(want ? A1.test(s) : A0.test(s))) return false;
        }
    return true;
}

// ---------------------------------------------------------------- searches

namespace {

Witness make_witness(WitnessKind kind, int k, std::vector<std::string> names, std::vector<std::vector<std::uint64_t>> roles) {
    Witness w;
    w.kind = kind;
    w.k = k;
    w.role_names = std::move(names);
    w.roles = std::move(roles);
    return w;
}

Bitset full_bits(std::uint64_t n) {
    Bitset b(n);
    b.flip_all();
    return b;
}

}  // namespace

SearchResult find_op(const GroupSubset& A, int k, const SearchBudget& budget) {
    if (k < 1) throw ValidationError("find_op: k must be positive");
    const GroupSpec& g = A.spec();
    detail::Translates tr(g, A.bits(), A.complement().bits());
    detail::Pattern pat{2, {k, k}, [](const int* idx) { return idx[0] <= idx[1] ? 1 : 0; }};
    detail::Engine eng(g, tr, pat, {full_bits(g.order()), full_bits(g.order())}, {budget.symmetry, false}, budget);
    SearchResult res;
    std::vector<std::vector<std::uint64_t>> sol;
    res.status = eng.find(sol);
    res.nodes = eng.nodes();
    if (res.status == SearchStatus::FOUND) res.witness = make_witness(WitnessKind::OP, k, {"a", "b"}, sol);
    return res;
}

SearchResult find_hop2(const GroupSubset& A, int k, const SearchBudget& budget) {
    if (k < 1) throw ValidationError("find_hop2: k must be positive");
    const GroupSpec& g = A.spec();
    detail::Translates tr(g, A.bits(), A.complement().bits());
    detail::Pattern pat{3, {k, k, k}, [](const int* idx) { return idx[0] + 1 < idx[1] + 1 + idx[2] + 1 ? 1 : 0; }};
    detail::Engine eng(g, tr, pat, {full_bits(g.order()), full_bits(g.order()), full_bits(g.order())},
                       {budget.symmetry, budget.symmetry, false}, budget);
    SearchResult res;
    std::vector<std::vector<std::uint64_t>> sol;
    res.status = eng.find(sol);
    res.nodes = eng.nodes();
    if (res.status == SearchStatus::FOUND) res.witness = make_witness(WitnessKind::HOP2, k, {"a", "b", "c"}, sol);
    return res;
}

SearchResult find_fop2(const GroupSubset& A, int k, const SearchBudget& budget) {
    if (k < 1) throw ValidationError("find_fop2: k must be positive");
    if (k * k > 16) throw CapacityError("find_fop2: k too large for the function family");
    const GroupSpec& g = A.spec();
    const std::uint64_t N = g.order();
    SearchResult res;
    // Staircase patterns over (i, s): bit (i * k + s) set iff s + 1 <= g(i + 1).
    const int ng = ipow(k, k);
    std::vector<std::uint32_t> stair(static_cast<std::size_t>(ng));
    for (int code = 0; code < ng; ++code) {
        std::uint32_t m = 0;
        int c = code;
        for (int i = 0; i < k; ++i) {
            int gi = c % k + 1;
            c /= k;
            for (int s = 0; s < gi; ++s) m |= 1U << (i * k + s);
        }
        stair[code] = m;
    }
    std::vector<std::uint64_t> x(static_cast<std::size_t>(k), 0), z(static_cast<std::size_t>(k), 0);
    const int free_x = budget.symmetry ? k - 1 : k, free_z = budget.symmetry ? k - 1 : k;
    const int free_vars = free_x + free_z;
    std::vector<std::uint64_t> pos(static_cast<std::size_t>(free_vars), 0);
    std::vector<std::uint64_t> rep(static_cast<std::size_t>(ng));
    std::vector<std::uint32_t> xz(static_cast<std::size_t>(k * k));
    while (true) {
        for (int t = 0; t < free_x; ++t) x[k - free_x + t] = pos[t];
        for (int t = 0; t < free_z; ++t) z[k - free_z + t] = pos[free_x + t];
        ++res.nodes;
        if (res.nodes * N > budget.node_limit) {
            res.status = SearchStatus::BOUND_ONLY;
            return res;
        }
        std::vector<std::uint64_t> xzs(static_cast<std::size_t>(k * k));
        for (int i = 0; i < k; ++i)
            for (int s = 0; s < k; ++s) xzs[i * k + s] = g.add(x[i], z[s]);
        std::fill(rep.begin(), rep.end(), N);
        int found = 0;
        for (std::uint64_t y = 0; y < N && found < ng; ++y) {
            std::uint32_t m = 0;
            for (int t = 0; t < k * k; ++t)
                if (A.contains(g.add(xzs[t], y))) m |= 1U << t;
            for (int c = 0; c < ng; ++c)
                if (stair[c] == m && rep[c] == N) rep[c] = y, ++found;
        }
        if (found == ng) {
            const std::size_t nf = static_cast<std::size_t>(ipow(k, k * k));
            std::vector<std::uint64_t> ys(nf * static_cast<std::size_t>(k));
            for (std::size_t f = 0; f < nf; ++f)
                for (int j = 0; j < k; ++j) {
                    // g_j(i) = f(i, j); f digit at (i-1)k + (j-1).
                    int code = 0, mult = 1;
                    for (int i = 0; i < k; ++i) {
                        int digit = static_cast<int>(f / static_cast<std::size_t>(ipow(k, i * k + j)) % static_cast<std::size_t>(k));
                        code += digit * mult;
                        mult *= k;
                    }
                    ys[f * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] = rep[code];
                }
            res.status = SearchStatus::FOUND;
            res.witness = make_witness(WitnessKind::FOP2, k, {"x", "z", "y"}, {x, z, ys});
            return res;
        }
        int t = free_vars - 1;
        while (t >= 0 && ++pos[t] == N) pos[t--] = 0;
        if (t < 0) break;
    }
    res.status = SearchStatus::NONE;
    return res;
}

SearchResult find_vc(const GroupSubset& A, int k, const SearchBudget& budget) {
    if (k < 1 || k > 20) throw ValidationError("find_vc: k out of range");
    const GroupSpec& g = A.spec();
    const std::uint64_t N = g.order();
    SearchResult res;
    std::vector<std::uint64_t> a;
    std::vector<std::uint32_t> mask(N, 0);
    std::vector<std::uint8_t> seen;
    bool out_of_budget = false;
    std::function<bool(std::uint64_t)> dfs = [&](std::uint64_t from) -> bool {
        const int j = static_cast<int>(a.size());
        if (j == k) return true;
        std::uint64_t lo = j == 0 ? 0 : from;
        std::uint64_t hi = (j == 0 && budget.symmetry) ? 1 : N;
        for (std::uint64_t v = lo; v < hi; ++v) {
            res.nodes += N;
            if (res.nodes > budget.node_limit) {
                out_of_budget = true;
                return false;
            }
            seen.assign(std::size_t(1) << (j + 1), 0);
            std::size_t distinct = 0;
            for (std::uint64_t b = 0; b < N; ++b) {
                std::uint32_t m = mask[b] | (A.contains(g.add(v, b)) ? (1U << j) : 0U);
                if (!seen[m]) seen[m] = 1, ++distinct;
            }
            if (distinct < (std::size_t(1) << (j + 1))) continue;
            for (std::uint64_t b = 0; b < N; ++b)
                if (A.contains(g.add(v, b))) mask[b] |= 1U << j;
            a.push_back(v);
            if (dfs(v + 1)) return true;
            a.pop_back();
            for (std::uint64_t b = 0; b < N; ++b) mask[b] &= ~(1U << j);
            if (out_of_budget) return false;
        }
        return false;
    };
    if (dfs(0)) {
        std::vector<std::uint64_t> bs(std::size_t(1) << k, N);
        for (std::uint64_t b = 0; b < N; ++b)
            if (bs[mask[b]] == N) bs[mask[b]] = b;
        res.status = SearchStatus::FOUND;
        res.witness = make_witness(WitnessKind::VC, k, {"a", "b"}, {a, bs});
    } else {
        res.status = out_of_budget ? SearchStatus::BOUND_ONLY : SearchStatus::NONE;
    }
    return res;
}

SearchResult find_vc2(const GroupSubset& A, int k, const SearchBudget& budget) {
    if (k < 1 || k * k > 20) throw ValidationError("find_vc2: k out of range");
    const GroupSpec& g = A.spec();
    const std::uint64_t N = g.order();
    SearchResult res;
    std::vector<std::uint64_t> b, c;
    bool out_of_budget = false;
    std::vector<std::uint8_t> seen;
    std::vector<std::uint32_t> mask;
    // Distinct patterns over all a, for the current b (all) and c (prefix).
    auto full_patterns = [&](std::size_t want_bits) {
        seen.assign(std::size_t(1) << want_bits, 0);
        mask.assign(N, 0);
        std::size_t distinct = 0;
        for (std::uint64_t a = 0; a < N; ++a) {
            std::uint32_t m = 0;
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = 0; j < c.size(); ++j)
                    if (A.contains(g.add(a, g.add(b[i], c[j])))) m |= 1U << (i * static_cast<std::size_t>(k) + j);
            mask[a] = m;
            // Compress to the bits in use for counting.
            std::uint32_t cm = 0;
            std::size_t bit = 0;
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = 0; j < c.size(); ++j, ++bit)
                    if ((m >> (i * static_cast<std::size_t>(k) + j)) & 1U) cm |= 1U << bit;
            if (!seen[cm]) seen[cm] = 1, ++distinct;
        }
        return distinct == (std::size_t(1) << want_bits);
    };
    std::function<bool(std::uint64_t)> dfs_c = [&](std::uint64_t from) -> bool {
        if (static_cast<int>(c.size()) == k) return true;
        std::uint64_t lo = c.empty() ? 0 : from, hi = (c.empty() && budget.symmetry) ? 1 : N;
        for (std::uint64_t v = lo; v < hi; ++v) {
            res.nodes += N;
            if (res.nodes > budget.node_limit) {
                out_of_budget = true;
                return false;
            }
            c.push_back(v);
            if (full_patterns(b.size() * c.size()) && dfs_c(v + 1)) return true;
            c.pop_back();
            if (out_of_budget) return false;
        }
        return false;
    };
    std::function<bool(std::uint64_t)> dfs_b = [&](std::uint64_t from) -> bool {
        if (static_cast<int>(b.size()) == k) return dfs_c(0);
        std::uint64_t lo = b.empty() ? 0 : from, hi = (b.empty() && budget.symmetry) ? 1 : N;
        for (std::uint64_t v = lo; v < hi; ++v) {
            b.push_back(v);
            if (dfs_b(v + 1)) return true;
            b.pop_back();
            if (out_of_budget) return false;
        }
        return false;
    };
    if (dfs_b(0)) {
        full_patterns(static_cast<std::size_t>(k * k));
        std::vector<std::uint64_t> as(std::size_t(1) << (k * k), N);
        for (std::uint64_t a = 0; a < N; ++a)
            if (as[mask[a]] == N) as[mask[a]] = a;
        res.status = SearchStatus::FOUND;
        res.witness = make_witness(WitnessKind::VC2, k, {"b", "c", "a"}, {b, c, as});
    } else {
        res.status = out_of_budget ? SearchStatus::BOUND_ONLY : SearchStatus::NONE;
    }
    return res;
}

namespace {
template <class Finder>
DimensionResult dimension(const GroupSubset& A, int kmax, const SearchBudget& budget, Finder find) {
    DimensionResult r;
    for (int k = 1; k <= kmax; ++k) {
        auto s = find(A, k, budget);
        r.nodes += s.nodes;
        if (s.status == SearchStatus::FOUND) {
            r.dim = k;
            r.witness = s.witness;
            continue;
        }
        r.exact = s.status == SearchStatus::NONE;
        return r;
    }
    // Reached kmax without refuting kmax + 1: exact only below kmax.
    r.exact = false;
    return r;
}
}  // namespace

DimensionResult vc_dim(const GroupSubset& A, int kmax, const SearchBudget& budget) {
    return dimension(A, kmax, budget, find_vc);
}

DimensionResult vc2_dim(const GroupSubset& A, int kmax, const SearchBudget& budget) {
    return dimension(A, kmax, budget, find_vc2);
}

Cap2Result cap2_check(const GroupSubset& A, const SearchBudget& budget) {
    const GroupSpec& g = A.spec();
    const std::uint64_t N = g.order();
    detail::Translates tr(g, A.bits(), A.complement().bits());
    Cap2Result r;
    const std::uint64_t xlo = 0, xhi = budget.symmetry ? 1 : N;
    for (std::uint64_t x1 = xlo; x1 < xhi; ++x1)
        for (std::uint64_t y1 = xlo; y1 < xhi; ++y1)
            for (std::uint64_t x2 = 0; x2 < N; ++x2)
                for (std::uint64_t y2 = 0; y2 < N; ++y2) {
                    if (++r.nodes > budget.node_limit) {
                        r.status = SearchStatus::BOUND_ONLY;
                        return r;
                    }
                    const std::uint64_t s11 = g.add(x1, y1), s12 = g.add(x1, y2), s21 = g.add(x2, y1), s22 = g.add(x2, y2);
                    Bitset z1 = tr.in(s11);
                    z1 &= tr.in(s12);
                    z1 &= tr.in(s21);
                    z1 &= tr.in(s22);
                    if (!z1.any()) continue;
                    Bitset z2 = tr.in(s11);
                    z2 &= tr.in(s12);
                    z2 &= tr.in(s21);
                    z2 &= tr.out(s22);
                    if (!z2.any()) continue;
                    r.holds = false;
                    r.status = SearchStatus::FOUND;
                    r.cube = {x1, x2, y1, y2, z1.next(0), z2.next(0)};
                    return r;
                }
    r.status = SearchStatus::NONE;
    return r;
}

// ----------------------------------------------------------- tree encodings

namespace {

struct TreeShape {
    int d;
    std::size_t nodes, leaves;
    // For leaf eta and depth len: node index and side bit.
    std::size_t node_of(std::size_t eta, int len) const { return (std::size_t(1) << len) - 1 + (eta >> (d - len)); }
    bool bit_of(std::size_t eta, int len) const { return (eta >> (d - len - 1)) & 1U; }
    bool on_branch(std::size_t node, std::size_t eta, bool& bit) const {
        int len = 0;
        while ((std::size_t(1) << (len + 1)) - 1 <= node) ++len;
        if (node_of(eta, len) != node) return false;
        bit = bit_of(eta, len);
        return true;
    }
};

}  // namespace

u128 count_tree_encodings(const GroupSpec& g, const Bitset& in, const Bitset& out, int d, const Bitset& leaves_in,
                          const Bitset& nodes_in, bool good, std::uint64_t node_limit) {
    if (d < 1 || d > 4) throw CapacityError("count_tree_encodings: d must be in [1,4]");
    detail::Translates tr(g, in, out);
    Bitset either = in;
    either |= out;
    detail::Translates tr_any(g, either, either);
    std::vector<std::uint64_t> nodes_list;
    for (auto i = nodes_in.next(0); i < nodes_in.size(); i = nodes_in.next(i + 1)) nodes_list.push_back(i);
    std::uint64_t work = 0;
    if (!good) {
        // Constraints run along branches only, so the count factors over the two subtrees of each node.
        std::function<u128(int, const Bitset&)> rec = [&](int len, const Bitset& cand) -> u128 {
            if (len == d) return cand.count();
            u128 total = 0;
            for (auto h : nodes_list) {
                if (++work > node_limit) throw CapacityError("count_tree_encodings: node budget exceeded");
                Bitset c0 = cand, c1 = cand;
                c0 &= tr.out(h);
                c1 &= tr.in(h);
                if (!c1.any() || !c0.any()) continue;
                u128 left = rec(len + 1, c0);
                if (left == 0) continue;
                total += left * rec(len + 1, c1);
            }
            return total;
        };
        return rec(0, leaves_in);
    }
    TreeShape shape{d, (std::size_t(1) << d) - 1, std::size_t(1) << d};
    std::vector<std::uint64_t> h(shape.nodes);
    u128 total = 0;
    std::function<void(std::size_t)> enumerate = [&](std::size_t t) {
        if (t == shape.nodes) {
            u128 prod = 1;
            for (std::size_t eta = 0; eta < shape.leaves && prod != 0; ++eta) {
                Bitset cand = leaves_in;
                for (std::size_t s = 0; s < shape.nodes; ++s) {
                    bool bit;
                    if (shape.on_branch(s, eta, bit))
                        cand &= bit ? tr.in(h[s]) : tr.out(h[s]);
                    else
                        cand &= tr_any.in(h[s]);
                }
                prod *= cand.count();
            }
            total += prod;
            return;
        }
        for (auto v : nodes_list) {
            if (++work > node_limit) throw CapacityError("count_tree_encodings: node budget exceeded");
            h[t] = v;
            enumerate(t + 1);
        }
    };
    enumerate(0);
    return total;
}

u128 count_tree_encodings(const GroupSubset& A, int d, const Bitset& leaves_in, const Bitset& nodes_in) {
    return count_tree_encodings(A.spec(), A.bits(), A.complement().bits(), d, leaves_in, nodes_in, false);
}

SearchResult find_tree_encoding(const GroupSpec& g, const Bitset& in, const Bitset& out, int d, const Bitset& leaves_in,
                                const Bitset& nodes_in, bool good, const SearchBudget& budget) {
    if (d < 1 || d > 8) throw CapacityError("find_tree_encoding: d must be in [1,8]");
    detail::Translates tr(g, in, out);
    Bitset either = in;
    either |= out;
    detail::Translates tr_any(g, either, either);
    TreeShape shape{d, (std::size_t(1) << d) - 1, std::size_t(1) << d};
    std::vector<std::uint64_t> h(shape.nodes);
    std::vector<Bitset> cand(shape.leaves, leaves_in);
    SearchResult res;
    bool out_of_budget = false;
    std::function<bool(std::size_t)> dfs = [&](std::size_t t) -> bool {
        if (t == shape.nodes) return true;
        for (auto v = nodes_in.next(0); v < nodes_in.size(); v = nodes_in.next(v + 1)) {
            if (++res.nodes > budget.node_limit) {
                out_of_budget = true;
                return false;
            }
            h[t] = v;
            std::vector<Bitset> saved = cand;
            bool ok = true;
            for (std::size_t eta = 0; eta < shape.leaves && ok; ++eta) {
                bool bit;
                if (shape.on_branch(t, eta, bit))
                    cand[eta] &= bit ? tr.in(v) : tr.out(v);
                else if (good)
                    cand[eta] &= tr_any.in(v);
                ok = cand[eta].any();
            }
            if (ok && dfs(t + 1)) return true;
            cand = std::move(saved);
            if (out_of_budget) return false;
        }
        return false;
    };
    if (dfs(0)) {
        std::vector<std::uint64_t> leaves(shape.leaves);
        for (std::size_t eta = 0; eta < shape.leaves; ++eta) leaves[eta] = cand[eta].next(0);
        res.status = SearchStatus::FOUND;
        res.witness = make_witness(WitnessKind::TREE, d, {"nodes", "leaves"}, {h, leaves});
    } else {
        res.status = out_of_budget ? SearchStatus::BOUND_ONLY : SearchStatus::NONE;
    }
    return res;
}

int hodges_depth(int k) { return (1 << (k + 2)) - 2; }

HodgesResult hodges_extract(const Witness& tree, const GroupSubset& A, int k) {
    HodgesResult r;
    if (tree.kind != WitnessKind::TREE || !revalidate(tree, A)) {
        r.message = "input is not a valid encoding";
        return r;
    }
    if (tree.k < hodges_depth(k)) {
        r.message = "depth below 2^{k+2}-2";
        return r;
    }
    const GroupSpec& g = A.spec();
    const auto& nodes = tree.roles[0];
    const auto& leaves = tree.roles[1];
    std::vector<std::vector<char>> adj(nodes.size(), std::vector<char>(leaves.size()));
    for (std::size_t s = 0; s < nodes.size(); ++s)
        for (std::size_t e = 0; e < leaves.size(); ++e) adj[s][e] = A.contains(g.add(nodes[s], leaves[e]));
    // Interleaved backtracking c_1, b_1, c_2, b_2, ... with c_i + b_j in A iff i <= j.
    std::vector<std::size_t> c, b;
    std::function<bool()> dfs = [&]() -> bool {
        if (static_cast<int>(b.size()) == k) return true;
        if (c.size() == b.size()) {
            const std::size_t i = c.size();
            for (std::size_t s = 0; s < nodes.size(); ++s) {
                bool ok = true;
                for (std::size_t j = 0; j < b.size() && ok; ++j) ok = adj[s][b[j]] == (i <= j);
                if (!ok) continue;
                c.push_back(s);
                if (dfs()) return true;
                c.pop_back();
            }
            return false;
        }
        const std::size_t j = b.size();
        for (std::size_t e = 0; e < leaves.size(); ++e) {
            bool ok = true;
            for (std::size_t i = 0; i < c.size() && ok; ++i) ok = adj[c[i]][e] == (i <= j);
            if (!ok) continue;
            b.push_back(e);
            if (dfs()) return true;
            b.pop_back();
        }
        return false;
    };
    if (!dfs()) {
        r.message = "no H(k) copy between nodes and leaves";
        return r;
    }
    std::vector<std::uint64_t> cs, bs;
    for (auto s : c) cs.push_back(nodes[s]);
    for (auto e : b) bs.push_back(leaves[e]);
    r.op = make_witness(WitnessKind::OP, k, {"a", "b"}, {cs, bs});
    r.ok = revalidate(r.op, A);
    if (!r.ok) r.message = "extracted copy failed revalidation";
    return r;
}

// -------------------------------------------------------------- good copies

SearchResult find_good_copy(const GroupSpec& labels, const Bitset& A1, const Bitset& A0, CopyPattern pattern, int k,
                            const Bitset* side, const SearchBudget& budget) {
    if (k < 1 || (pattern == CopyPattern::U && k > 16)) throw ValidationError("find_good_copy: k out of range");
    detail::Translates tr(labels, A1, A0);
    const int right = pattern == CopyPattern::H ? k : (1 << k);
    detail::Pattern pat{2, {k, right}, pattern == CopyPattern::H
                                           ? std::function<int(const int*)>([](const int* idx) { return idx[0] <= idx[1] ? 1 : 0; })
                                           : std::function<int(const int*)>([](const int* idx) { return (idx[1] >> idx[0]) & 1; })};
    Bitset bdom = side ? *side : full_bits(labels.order());
    detail::Engine eng(labels, tr, pat, {full_bits(labels.order()), bdom}, {false, false}, budget);
    SearchResult res;
    std::vector<std::vector<std::uint64_t>> sol;
    res.status = eng.find(sol);
    res.nodes = eng.nodes();
    if (res.status == SearchStatus::FOUND)
        res.witness = make_witness(WitnessKind::GOODCOPY, k, {"a", pattern == CopyPattern::H ? "b" : "bS"}, sol);
    return res;
}

u128 count_good_copies(const GroupSpec& labels, const Bitset& A1, const Bitset& A0, int k, const Bitset* side,
                       std::uint64_t node_limit) {
    detail::Translates tr(labels, A1, A0);
    detail::Pattern pat{2, {k, k}, [](const int* idx) { return idx[0] <= idx[1] ? 1 : 0; }};
    Bitset bdom = side ? *side : full_bits(labels.order());
    SearchBudget budget;
    budget.node_limit = node_limit;
    detail::Engine eng(labels, tr, pat, {full_bits(labels.order()), bdom}, {false, false}, budget);
    SearchStatus st;
    u128 c = eng.count(st);
    if (st == SearchStatus::BOUND_ONLY) throw CapacityError("count_good_copies: node budget exceeded");
    return c;
}

// --------------------------------------------------------- affine embedding

AffineEmbedding affine_embedding_exists(const GroupSubset& AH, const GroupSubset& AG, std::uint64_t node_limit) {
    const GroupSpec& H = AH.spec();
    const GroupSpec& G = AG.spec();
    if (H.p() != G.p()) throw ValidationError("affine_embedding_exists: characteristics differ");
    AffineEmbedding res;
    if (H.n() > G.n()) return res;
    const int m = H.n();
    std::vector<std::uint64_t> img(static_cast<std::size_t>(m));
    std::vector<std::uint64_t> image_of(H.order());  // L(x) for x in the span of the chosen prefix
    std::uint64_t work = 0;
    std::uint64_t stride = 1;
    std::vector<std::uint64_t> strides(static_cast<std::size_t>(m) + 1, 1);
    for (int i = 1; i <= m; ++i) strides[i] = strides[i - 1] * static_cast<std::uint64_t>(H.p());
    (void)stride;
    for (std::uint64_t g0 = 0; g0 < G.order(); ++g0) {
        image_of[0] = 0;
        if (AH.contains(0) != AG.contains(g0)) continue;
        std::function<bool(int)> dfs = [&](int j) -> bool {
            if (j == m) return true;
            for (std::uint64_t v = 1; v < G.order(); ++v) {
                if (++work > node_limit) throw CapacityError("affine_embedding_exists: budget exceeded");
                // x with top digit j: L(x) = L(x - d e_j) + d v. Injectivity: v outside the span so far.
                bool ok = true;
                for (std::uint64_t x = 0; x < strides[j] && ok; ++x)
                    if (image_of[x] == v) ok = false;
                if (!ok) continue;
                for (std::uint64_t x = strides[j]; x < strides[j + 1] && ok; ++x) {
                    int d = static_cast<int>(x / strides[j]);
                    std::uint64_t y = G.add(image_of[x - static_cast<std::uint64_t>(d) * strides[j]], G.scale(v, d));
                    image_of[x] = y;
                    if (AH.contains(x) != AG.contains(G.add(g0, y))) ok = false;
                }
                if (!ok) continue;
                img[j] = v;
                if (dfs(j + 1)) return true;
            }
            return false;
        };
        if (dfs(0)) {
            res.found = true;
            res.shift = g0;
            res.basis_image = img;
            return res;
        }
    }
    return res;
}

// --------------------------------------------------------------- transforms

Witness hop_complement(const Witness& w) {
    if (w.kind != WitnessKind::HOP2) throw ValidationError("hop_complement: not a HOP2 witness");
    const int h = w.k / 2;
    const auto &x = w.roles[0], &y = w.roles[1], &z = w.roles[2];
    std::vector<std::uint64_t> a, b, c;
    for (int u = 1; u <= h; ++u) a.push_back(z[u - 1]);
    for (int v = 1; v <= h; ++v) b.push_back(x[h + v - 1]);
    for (int t = 1; t <= h; ++t) c.push_back(y[h - t]);
    return make_witness(WitnessKind::HOP2, h, {"a", "b", "c"}, {a, b, c});
}

Witness hop_to_op(const GroupSpec& g, const Witness& w) {
    if (w.kind != WitnessKind::HOP2) throw ValidationError("hop_to_op: not a HOP2 witness");
    const int l = w.k;
    const auto &x = w.roles[0], &y = w.roles[1], &z = w.roles[2];
    std::vector<std::uint64_t> a, b;
    for (int i = 1; i <= l; ++i) a.push_back(z[l - i]);
    for (int j = 1; j <= l; ++j) b.push_back(g.add(x[l - 1], y[j - 1]));
    return make_witness(WitnessKind::OP, l, {"a", "b"}, {a, b});
}

Witness fop_complement(const Witness& w) {
    if (w.kind != WitnessKind::FOP2 || w.k < 2) throw ValidationError("fop_complement: needs an l-FOP2 witness, l >= 2");
    const int l = w.k, m = l - 1;
    const auto &x = w.roles[0], &z = w.roles[1], &y = w.roles[2];
    std::vector<std::uint64_t> xs(x.begin(), x.begin() + m), us;
    for (int s = 1; s <= m; ++s) us.push_back(z[l - s]);
    const std::size_t nf = static_cast<std::size_t>(ipow(m, m * m));
    std::vector<std::uint64_t> ws(nf * static_cast<std::size_t>(m));
    for (std::size_t f = 0; f < nf; ++f) {
        // g = l - f on [m]^2, g = 1 elsewhere; encode g over [l]^2.
        std::size_t gcode = 0, mult = 1;
        std::size_t c = f;
        std::vector<int> fv(static_cast<std::size_t>(m * m));
        for (int t = 0; t < m * m; ++t) fv[t] = static_cast<int>(c % static_cast<std::size_t>(m)) + 1, c /= static_cast<std::size_t>(m);
        for (int i = 1; i <= l; ++i)
            for (int j = 1; j <= l; ++j) {
                int gv = (i <= m && j <= m) ? l - fv[(i - 1) * m + (j - 1)] : 1;
                (void)j;
                gcode += static_cast<std::size_t>(gv - 1) * mult;
                mult *= static_cast<std::size_t>(l);
            }
        for (int j = 1; j <= m; ++j) ws[f * static_cast<std::size_t>(m) + static_cast<std::size_t>(j - 1)] = y[gcode * static_cast<std::size_t>(l) + static_cast<std::size_t>(j - 1)];
    }
    return make_witness(WitnessKind::FOP2, m, {"x", "z", "y"}, {xs, us, ws});
}

Witness fop_to_vc(const GroupSpec& g, const Witness& w) {
    if (w.kind != WitnessKind::FOP2 || w.k < 2) throw ValidationError("fop_to_vc: needs an l-FOP2 witness, l >= 2");
    const int l = w.k;
    const auto &x = w.roles[0], &z = w.roles[1], &y = w.roles[2];
    std::vector<std::uint64_t> a, b;
    for (int i = 1; i <= l; ++i) a.push_back(g.add(x[i - 1], z[1]));
    for (std::size_t S = 0; S < (std::size_t(1) << l); ++S) {
        // f_S(i, 2) = 2 if i in S, all other values 1.
        std::size_t code = 0, mult = 1;
        for (int i = 1; i <= l; ++i)
            for (int j = 1; j <= l; ++j) {
                int v = (j == 2 && ((S >> (i - 1)) & 1U)) ? 2 : 1;
                code += static_cast<std::size_t>(v - 1) * mult;
                mult *= static_cast<std::size_t>(l);
            }
        b.push_back(y[code * static_cast<std::size_t>(l) + 1]);
    }
    return make_witness(WitnessKind::VC, l, {"a", "b"}, {a, b});
}

Witness vc2_to_fop(const Witness& w) {
    if (w.kind != WitnessKind::VC2) throw ValidationError("vc2_to_fop: not a VC2 witness");
    const int l = w.k;
    if (l * l > 16) throw CapacityError("vc2_to_fop: l too large");
    const auto &b = w.roles[0], &c = w.roles[1], &a = w.roles[2];
    std::vector<std::uint64_t> xs(c.begin(), c.end()), zs(b.begin(), b.end());
    const std::size_t nf = static_cast<std::size_t>(ipow(l, l * l));
    std::vector<std::uint64_t> ys(nf * static_cast<std::size_t>(l));
    for (std::size_t f = 0; f < nf; ++f) {
        std::vector<int> fv(static_cast<std::size_t>(l * l));
        std::size_t cc = f;
        for (int t = 0; t < l * l; ++t) fv[t] = static_cast<int>(cc % static_cast<std::size_t>(l)) + 1, cc /= static_cast<std::size_t>(l);
        for (int j = 1; j <= l; ++j) {
            // S = {(u, v) : u <= f(v, j)}, as a VC2 mask with bit (u-1)l + (v-1).
            std::size_t S = 0;
            for (int u = 1; u <= l; ++u)
                for (int v = 1; v <= l; ++v)
                    if (u <= fv[(v - 1) * l + (j - 1)]) S |= std::size_t(1) << ((u - 1) * l + (v - 1));
            ys[f * static_cast<std::size_t>(l) + static_cast<std::size_t>(j - 1)] = a[S];
        }
    }
    return make_witness(WitnessKind::FOP2, l, {"x", "z", "y"}, {xs, zs, ys});
}

}  // namespace qfa
