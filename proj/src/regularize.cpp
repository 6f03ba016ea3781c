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

#include "qfa/regularize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace qfa {

namespace {

constexpr double kTol = 1e-12;

int modp(long long v, int p) {
    long long r = v % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

void check_linear(const GroupSpec& g, const LinearFactor& L) {
    if (L.p != g.p() || L.n != g.n()) throw ShapeError("linear factor does not live in the ambient group");
    for (const auto& v : L.vectors)
        if (v.p() != g.p() || v.size() != g.n()) throw ShapeError("linear factor vector has the wrong shape");
}

std::vector<std::vector<int>> rows_of(const std::vector<FpVector>& vs) {
    std::vector<std::vector<int>> rows;
    for (const auto& v : vs) rows.push_back(v.coords());
    return rows;
}

// Basis of {x : v.x = 0 for all v}, as group indices.
std::vector<std::uint64_t> kernel_basis(const GroupSpec& g, const std::vector<FpVector>& vs) {
    const int p = g.p(), n = g.n();
    auto rr = vs.empty() ? std::vector<std::vector<int>>{} : row_reduce(p, rows_of(vs));
    std::vector<int> pivot_col;
    std::vector<char> is_pivot(static_cast<std::size_t>(n), 0);
    for (const auto& row : rr) {
        int c = 0;
        while (row[c] == 0) ++c;
        pivot_col.push_back(c);
        is_pivot[c] = 1;
    }
    std::vector<std::uint64_t> basis;
    for (int f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        FpVector v(p, n);
        v.set(f, 1);
        for (std::size_t r = 0; r < rr.size(); ++r) v.set(pivot_col[r], modp(-rr[r][f], p));
        basis.push_back(g.index_of(v));
    }
    return basis;
}

// Members of y + span(basis), in the little-endian coordinate order of GroupSpec(p, k).
std::vector<std::uint64_t> coset_members(const GroupSpec& g, const std::vector<std::uint64_t>& basis, std::uint64_t y) {
    std::vector<std::uint64_t> out{y};
    for (auto h : basis) {
        const std::size_t old = out.size();
        out.resize(old * static_cast<std::size_t>(g.p()));
        for (int t = 1; t < g.p(); ++t)
            for (std::size_t i = 0; i < old; ++i) out[t * old + i] = g.add(out[(t - 1) * old + i], h);
    }
    return out;
}

// Fourier transform of 1_A - density over the coset coordinates; empty when the coset is a point.
std::vector<Complex> local_dft(const GroupSubset& A, const std::vector<std::uint64_t>& members, int p, int k,
                               double* density = nullptr) {
    std::uint64_t hits = 0;
    for (auto x : members) hits += A.contains(x);
    const double a = double(hits) / double(members.size());
    if (density) *density = a;
    if (k == 0) return {};
    std::vector<Complex> f(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) f[i] = (A.contains(members[i]) ? 1.0 : 0.0) - a;
    return dft(GroupSpec(p, k), f);
}

// t with h_j . t = s_j for every basis vector h_j.
FpVector lift_character(const GroupSpec& g, const std::vector<std::uint64_t>& basis, const std::vector<int>& s) {
    const int p = g.p(), n = g.n();
    std::vector<std::vector<int>> aug;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        auto row = g.vector_of(basis[j]).coords();
        row.push_back(s[j]);
        aug.push_back(row);
    }
    auto rr = row_reduce(p, aug);
    FpVector t(p, n);
    for (const auto& row : rr) {
        int c = 0;
        while (c < n && row[c] == 0) ++c;
        if (c == n) throw Error("lift_character: inconsistent system");
        t.set(c, row[n]);
    }
    return t;
}

std::vector<int> digits_of(std::uint64_t code, int p, int k) {
    std::vector<int> d(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) d[j] = static_cast<int>(code % p), code /= p;
    return d;
}

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

// ---------------------------------------------------------------- atomicity

bool is_eps_atomic(double density, double eps) {
    // Densities exactly 0 or 1 count as atomic for every eps, including eps = 0.
    return density < eps || density > 1.0 - eps || density == 0.0 || density == 1.0;
}

AtomicityVerdict atomicity_check(const std::vector<std::uint32_t>& partition, const GroupSubset& A, double eps,
                                 double delta) {
    const GroupSpec& g = A.spec();
    if (partition.size() != g.order()) throw ShapeError("partition table size does not match the group");
    AtomicityVerdict v;
    v.eps = eps;
    v.delta = delta;
    v.group_order = g.order();
    std::uint32_t parts = 0;
    for (auto c : partition) parts = std::max(parts, c + 1);
    v.size.assign(parts, 0);
    std::vector<std::uint64_t> hits(parts, 0);
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        ++v.size[partition[x]];
        hits[partition[x]] += A.contains(x);
    }
    v.density.assign(parts, 0.0);
    for (std::uint32_t c = 0; c < parts; ++c) {
        if (v.size[c] == 0) continue;
        const double d = double(hits[c]) / double(v.size[c]);
        v.density[c] = d;
        if (!is_eps_atomic(d, eps)) {
            v.err.push_back(c);
            v.err_mass += v.size[c];
        } else if (d > 0.5) {
            v.near1.push_back(c);
        } else {
            v.near0.push_back(c);
        }
    }
    return v;
}

AqaleVerdict aqale_check(const QuadraticFactor& B, const GroupSubset& A, double eps, double delta) {
    const GroupSpec& g = A.spec();
    const int p = g.p();
    const std::uint64_t Lcodes = ipow(static_cast<std::uint64_t>(p), static_cast<int>(B.linear().size()));
    auto table = label_table(g, B);
    AqaleVerdict r;
    r.cells = atomicity_check(table, A, eps, delta);
    r.linear_atoms = ipow(static_cast<std::uint64_t>(p), B.ell());
    r.bound = delta * double(r.linear_atoms);
    std::set<std::uint64_t> sigma, mid;
    const double lo = 1.0 / (2.0 * p), hi = 1.0 - lo;
    for (std::uint32_t c = 0; c < r.cells.size.size(); ++c) {
        if (r.cells.size[c] == 0) continue;
        const std::uint64_t lin = c % Lcodes;
        if (!is_eps_atomic(r.cells.density[c], eps)) sigma.insert(lin);
        if (r.cells.density[c] > lo && r.cells.density[c] < hi) mid.insert(lin);
    }
    r.sigma.assign(sigma.begin(), sigma.end());
    r.mid_linear_atoms = mid.size();
    r.pass = double(r.sigma.size()) <= r.bound;
    return r;
}

StabilityReport refinement_stability_check(const std::vector<std::uint32_t>& coarse,
                                           const std::vector<std::uint32_t>& fine, const GroupSubset& A,
                                           double eps, double mu) {
    StabilityReport r;
    const double e2 = 2.0 * std::sqrt(eps);
    r.coarse = atomicity_check(coarse, A, eps, eps);
    r.fine = atomicity_check(fine, A, e2, e2);
    const double X = double(A.spec().order());
    auto fail = [&](const std::string& m) {
        r.precondition = false;
        r.message = m;
        return r;
    };
    if (!table_refines(fine, coarse)) return fail("fine partition does not refine the coarse one");
    if (!(mu >= 0 && mu < eps / 2)) return fail("mu must satisfy 0 <= mu < eps/2");
    std::vector<std::uint32_t> cparts;
    for (std::uint32_t c = 0; c < r.coarse.size.size(); ++c)
        if (r.coarse.size[c]) cparts.push_back(c);
    const double t = double(cparts.size());
    auto [cmin, cmax] = std::minmax_element(cparts.begin(), cparts.end(), [&](auto a, auto b) {
        return r.coarse.size[a] < r.coarse.size[b];
    });
    if (double(r.coarse.size[*cmax] - r.coarse.size[*cmin]) > mu * X / t + kTol)
        return fail("coarse part sizes differ by more than mu|X|/t");
    std::map<std::uint32_t, std::vector<std::uint64_t>> children;
    std::vector<std::int64_t> parent(r.fine.size.size(), -1);
    for (std::uint64_t x = 0; x < coarse.size(); ++x) parent[fine[x]] = coarse[x];
    for (std::uint32_t c = 0; c < r.fine.size.size(); ++c)
        if (r.fine.size[c]) children[static_cast<std::uint32_t>(parent[c])].push_back(r.fine.size[c]);
    const std::size_t s = children.begin()->second.size();
    for (const auto& [cp, sizes] : children) {
        if (sizes.size() != s) return fail("coarse parts split into different numbers of fine parts");
        auto [mn, mx] = std::minmax_element(sizes.begin(), sizes.end());
        if (double(*mx - *mn) > mu * X / (t * double(s)) + kTol)
            return fail("fine part sizes differ by more than mu|X|/(ts)");
    }
    r.precondition = true;
    r.holds = !r.coarse.almost() || r.fine.almost();
    r.message = r.holds ? "ok" : "fine partition is not almost 2 sqrt(eps)-atomic";
    return r;
}

// ----------------------------------------------------------- growth functions

GrowthFunction::GrowthFunction(const std::string& formula) : formula_(formula) {
    std::string s;
    for (char c : formula)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("growth function: empty formula");
    a2_ = a1_ = a0_ = 0;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t end = s.find('+', pos);
        if (end == std::string::npos) end = s.size();
        std::string term = s.substr(pos, end - pos);
        if (term.empty()) throw ParseError("growth function: empty term at position " + std::to_string(pos));
        long long c = 1;
        std::string rest = term;
        std::size_t i = 0;
        while (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) ++i;
        if (i > 0) {
            c = std::stoll(term.substr(0, i));
            rest = term.substr(i);
            if (!rest.empty()) {
                if (rest[0] != '*') throw ParseError("growth function: expected '*' at position " + std::to_string(pos + i));
                rest = rest.substr(1);
            }
        }
        if (rest.empty() && i > 0)
            a0_ += c;
        else if (rest == "x")
            a1_ += c;
        else if (rest == "x^2")
            a2_ += c;
        else
            throw ParseError("growth function: bad term '" + term + "' at position " + std::to_string(pos));
        pos = end + 1;
    }
}

long long GrowthFunction::operator()(long long x) const { return a2_ * x * x + a1_ * x + a0_; }

// ----------------------------------------------------------- uniform cosets

std::vector<std::uint32_t> linear_table(const GroupSpec& g, const LinearFactor& L) {
    check_linear(g, L);
    std::vector<std::uint32_t> t(g.order(), 0);
    std::uint32_t mult = 1;
    for (const auto& v : L.vectors) {
        auto dt = dot_table(g, v);
        for (std::uint64_t x = 0; x < g.order(); ++x) t[x] += dt[x] * mult;
        mult *= static_cast<std::uint32_t>(g.p());
    }
    return t;
}

std::vector<std::uint64_t> subspace_members(const GroupSpec& g, const LinearFactor& H) {
    check_linear(g, H);
    return coset_members(g, kernel_basis(g, H.vectors), 0);
}

double coset_uniformity(const GroupSubset& A, const LinearFactor& H, std::uint64_t y) {
    const GroupSpec& g = A.spec();
    check_linear(g, H);
    auto basis = kernel_basis(g, H.vectors);
    auto fh = local_dft(A, coset_members(g, basis, y), g.p(), static_cast<int>(basis.size()));
    double m = 0;
    for (std::size_t s = 1; s < fh.size(); ++s) m = std::max(m, std::abs(fh[s]));
    return m;
}

CosetResult find_uniform_dense_coset(const GroupSubset& A, const LinearFactor& H, double eps) {
    const GroupSpec& g = A.spec();
    check_linear(g, H);
    if (!(eps > 0 && eps <= 1)) throw RangeError("find_uniform_dense_coset: eps must lie in (0, 1]");
    const int p = g.p();
    const int cap = static_cast<int>(std::floor(2.0 / eps));
    CosetResult r;
    r.sub = H;
    r.y = 0;
    auto basis = kernel_basis(g, H.vectors);
    local_dft(A, coset_members(g, basis, 0), p, 0, &r.base_density);
    while (true) {
        auto members = coset_members(g, basis, r.y);
        const int k = static_cast<int>(basis.size());
        auto fh = local_dft(A, members, p, k, &r.density);
        std::size_t best = 0;
        double bv = 0;
        for (std::size_t s = 1; s < fh.size(); ++s) {
            const double a = std::abs(fh[s]);
            if (a > bv + kTol) bv = a, best = s;
        }
        r.uniformity = bv;
        if (best == 0 || bv <= eps) break;
        if (r.codim >= cap)
            throw Error("find_uniform_dense_coset: codimension bound " + std::to_string(cap) + " exceeded");
        auto s = digits_of(best, p, k);
        FpVector t = lift_character(g, basis, s);
        // Cosets of the new subgroup inside H' + y are the level sets of s . c.
        std::vector<std::uint64_t> cnt(static_cast<std::size_t>(p), 0), first(static_cast<std::size_t>(p), members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            auto c = digits_of(i, p, k);
            long long v = 0;
            for (int j = 0; j < k; ++j) v += static_cast<long long>(c[j]) * s[j];
            const int lv = modp(v, p);
            cnt[lv] += A.contains(members[i]);
            if (first[lv] == members.size()) first[lv] = i;
        }
        const int lv = static_cast<int>(std::max_element(cnt.begin(), cnt.end()) - cnt.begin());
        r.y = members[first[lv]];
        r.sub.vectors.push_back(t);
        ++r.codim;
        basis = kernel_basis(g, r.sub.vectors);
    }
    if (r.codim > cap) throw Error("find_uniform_dense_coset: codimension postcondition failed");
    if (r.density + kTol < r.base_density) throw Error("find_uniform_dense_coset: density decreased");
    if (r.uniformity > eps + kTol) throw Error("find_uniform_dense_coset: coset is not eps-uniform");
    return r;
}

std::variant<DenseSubspace, EncodingEvidence> find_dense_subspace(const GroupSubset& A, const LinearFactor& H,
                                                                   double eps, int d, int m, double uniform_eps) {
    const GroupSpec& g = A.spec();
    check_linear(g, H);
    if (!(eps > 0 && eps < 1)) throw RangeError("find_dense_subspace: eps must lie in (0, 1)");
    if (uniform_eps < 0) uniform_eps = eps * eps;
    auto Hm = subspace_members(g, H);
    std::uint64_t hits = 0;
    for (auto x : Hm) hits += A.contains(x);
    if (double(hits) < eps * double(Hm.size())) throw ValidationError("find_dense_subspace: |A cap H| < eps |H|");
    CosetResult c = find_uniform_dense_coset(A, H, uniform_eps);
    if (c.density >= 1.0 - eps) return DenseSubspace{c, std::pow(eps, -m)};
    EncodingEvidence ev;
    ev.coset = c;
    ev.d = d;
    Bitset leaves(g.order()), nodes(g.order());
    for (auto x : subspace_members(g, c.sub)) {
        leaves.set(x);
        nodes.set(g.add(x, c.y));
    }
    const Bitset out = A.complement().bits();
    ev.count = count_tree_encodings(g, A.bits(), out, d, leaves, nodes);
    auto found = find_tree_encoding(g, A.bits(), out, d, leaves, nodes);
    if (found.status == SearchStatus::FOUND) ev.witness = found.witness;
    return ev;
}

// ------------------------------------------------------------- factor chains

namespace {

double chain_threshold(const FactorChain& ch, int p, int prev_rel) {
    return ch.eps * std::pow(double(p), -double(ch.g(prev_rel)));
}

std::uint8_t classify(double density, double theta) {
    if (density >= 1.0 - theta) return 1;
    if (density <= theta) return 0;
    return 2;
}

struct CosetStats {
    std::vector<std::uint32_t> table;
    std::vector<std::uint64_t> size, hits;
};

CosetStats coset_stats(const GroupSubset& A, const LinearFactor& L) {
    CosetStats s;
    s.table = linear_table(A.spec(), L);
    const std::size_t codes = ipow(static_cast<std::uint64_t>(A.spec().p()), static_cast<int>(L.vectors.size()));
    s.size.assign(codes, 0);
    s.hits.assign(codes, 0);
    for (std::uint64_t x = 0; x < A.spec().order(); ++x) {
        ++s.size[s.table[x]];
        s.hits[s.table[x]] += A.contains(x);
    }
    return s;
}

// Number of error children per parent code.
std::map<std::uint32_t, std::uint64_t> errors_per_parent(const std::vector<std::uint32_t>& parent,
                                                        const std::vector<std::uint32_t>& child,
                                                        const std::vector<std::uint8_t>& gamma) {
    std::map<std::uint32_t, std::uint64_t> out;
    std::set<std::uint32_t> seen;
    for (std::size_t x = 0; x < child.size(); ++x) {
        out.try_emplace(parent[x], 0);
        if (gamma[child[x]] == 2 && seen.insert(child[x]).second) ++out[parent[x]];
    }
    return out;
}

}  // namespace

ChainCheck factor_chain_check(const FactorChain& ch, const GroupSubset& A) {
    const GroupSpec& g = A.spec();
    const int p = g.p();
    ChainCheck r;
    auto note = [&](const std::string& m) {
        if (!r.detail.empty()) r.detail += "; ";
        r.detail += m;
    };
    if (ch.factors.empty()) {
        r.syntactic = false;
        note("chain has no factors");
        return r;
    }
    if (ch.gamma.size() != ch.factors.size() - 1) {
        r.densities = r.error_spread = false;
        note("gamma count does not match the number of steps");
        return r;
    }
    const int l0 = ch.factors[0].complexity();
    std::vector<CosetStats> st;
    for (const auto& L : ch.factors) st.push_back(coset_stats(A, L));
    for (int i = 1; i <= ch.T(); ++i) {
        const auto &prev = ch.factors[i - 1], &cur = ch.factors[i];
        for (const auto& v : prev.vectors)
            if (std::find(cur.vectors.begin(), cur.vectors.end(), v) == cur.vectors.end()) {
                r.syntactic = false;
                note("step " + std::to_string(i) + ": L_" + std::to_string(i - 1) + " vector missing from L_" +
                     std::to_string(i));
                break;
            }
        const int li = cur.complexity(), lp = prev.complexity();
        if (!(ch.f(lp - l0) < li - l0 && li - l0 <= ch.D)) {
            r.growth = false;
            note("step " + std::to_string(i) + ": growth f(" + std::to_string(lp - l0) + ") < " + std::to_string(li - l0) +
                 " <= " + std::to_string(ch.D) + " fails");
        }
        const double theta = chain_threshold(ch, p, lp - l0);
        const auto& gm = ch.gamma[i - 1];
        if (gm.size() != st[i].size.size()) {
            r.densities = r.error_spread = false;
            note("step " + std::to_string(i) + ": gamma table has the wrong size");
            continue;
        }
        for (std::size_t c = 0; c < gm.size(); ++c) {
            if (st[i].size[c] == 0 || gm[c] == 2) continue;
            const double d = double(st[i].hits[c]) / double(st[i].size[c]);
            const double du = gm[c] == 1 ? d : 1.0 - d;
            if (du < 1.0 - theta - kTol) {
                r.densities = false;
                note("step " + std::to_string(i) + ": atom " + std::to_string(c) + " labelled " + std::to_string(gm[c]) +
                     " has density " + std::to_string(d));
            }
        }
        const double allow = theta * std::pow(double(p), double(li - lp));
        for (const auto& [par, cnt] : errors_per_parent(st[i - 1].table, st[i].table, gm))
            if (double(cnt) > allow + kTol) {
                r.error_spread = false;
                note("step " + std::to_string(i) + ": parent " + std::to_string(par) + " holds " + std::to_string(cnt) +
                     " error atoms > " + std::to_string(allow));
            }
    }
    return r;
}

// ----------------------------------------------------------- stable engine

StableResult stable_linear_decomposition(const GroupSubset& A, const LinearFactor& H0,
                                         const std::vector<std::uint32_t>& omega0, const StableParams& prm) {
    const GroupSpec& g = A.spec();
    check_linear(g, H0);
    const int p = g.p();
    if (rank_of_rows(p, rows_of(H0.vectors)) != static_cast<int>(H0.vectors.size()) && !H0.vectors.empty())
        throw ValidationError("stable_linear_decomposition: H_0 vectors must be independent");
    const double mu = prm.mu < 0 ? prm.eps : prm.mu;
    StableResult r;
    r.ell = static_cast<int>(H0.vectors.size());
    r.sub = H0;
    const auto t0 = linear_table(g, H0);
    std::set<std::uint32_t> skip(omega0.begin(), omega0.end());

    while (true) {
        r.threshold = prm.eps * std::pow(double(p), -double(prm.psi(r.m)));
        auto table = linear_table(g, r.sub);
        r.verdict = atomicity_check(table, A, r.threshold, 1.0);
        r.omega = r.verdict.err;
        const double cosets = double(ipow(static_cast<std::uint64_t>(p), r.m + r.ell));
        r.omega_bound = (mu + r.threshold) * cosets;
        r.error_fraction_by_m.push_back(double(r.omega.size()) / cosets);
        if (double(r.omega.size()) <= r.omega_bound + kTol) {
            r.pass = true;
            break;
        }
        if (r.m >= prm.max_codim || r.m + r.ell >= g.n()) {
            r.exhausted = true;
            break;
        }
        // Energy of every nontrivial character of H', summed over the error cosets outside omega0.
        auto basis = kernel_basis(g, r.sub.vectors);
        const int k = static_cast<int>(basis.size());
        std::vector<double> energy(ipow(static_cast<std::uint64_t>(p), k), 0.0);
        std::vector<std::uint64_t> rep(ipow(static_cast<std::uint64_t>(p), static_cast<int>(r.sub.vectors.size())), g.order());
        for (std::uint64_t x = 0; x < g.order(); ++x)
            if (rep[table[x]] == g.order()) rep[table[x]] = x;
        for (auto c : r.omega) {
            if (skip.count(static_cast<std::uint32_t>(t0[rep[c]]))) continue;
            auto fh = local_dft(A, coset_members(g, basis, rep[c]), p, k);
            for (std::size_t s = 1; s < fh.size(); ++s) energy[s] += std::norm(fh[s]);
        }
        std::size_t best = 0;
        double bv = 0;
        for (std::size_t s = 1; s < energy.size(); ++s)
            if (energy[s] > bv + kTol) bv = energy[s], best = s;
        if (best == 0) {
            r.exhausted = true;  // only skipped cosets remain
            break;
        }
        r.sub.vectors.push_back(lift_character(g, basis, digits_of(best, p, k)));
        ++r.m;
    }

    // Chain: a subsequence of the refinement prefixes meeting the growth and error-spread conditions.
    FactorChain& ch = r.chain;
    ch.eps = prm.eps;
    ch.D = prm.max_codim;
    ch.f = prm.f;
    ch.g = prm.g;
    std::vector<CosetStats> st;
    std::vector<LinearFactor> prefix;
    for (int j = 0; j <= r.m; ++j) {
        LinearFactor L{p, g.n(), {r.sub.vectors.begin(), r.sub.vectors.begin() + r.ell + j}};
        prefix.push_back(L);
        st.push_back(coset_stats(A, L));
    }
    ch.factors.push_back(prefix[0]);
    int a = 0;
    while (true) {
        const double theta = prm.eps * std::pow(double(p), -double(prm.g(a)));
        int chosen = -1;
        std::vector<std::uint8_t> gm;
        for (int b = a + 1; b <= r.m; ++b) {
            if (!(prm.f(a) < b && b <= ch.D)) continue;
            std::vector<std::uint8_t> cand(st[b].size.size(), 0);
            for (std::size_t c = 0; c < cand.size(); ++c)
                cand[c] = st[b].size[c] ? classify(double(st[b].hits[c]) / double(st[b].size[c]), theta) : 0;
            const double allow = theta * std::pow(double(p), double(b - a));
            bool ok = true;
            for (const auto& [par, cnt] : errors_per_parent(st[a].table, st[b].table, cand))
                if (double(cnt) > allow + kTol) ok = false;
            if (ok) {
                chosen = b;
                gm = std::move(cand);
                break;
            }
        }
        if (chosen < 0) break;
        ch.factors.push_back(prefix[chosen]);
        ch.gamma.push_back(std::move(gm));
        a = chosen;
    }
    return r;
}

// ------------------------------------------------------------ brute force

QuadAtomization brute_quad_atomize(const GroupSubset& A, double eps, int max_complexity) {
    const GroupSpec& g = A.spec();
    const int p = g.p(), n = g.n();
    if (n > 3) throw CapacityError("brute_quad_atomize: n must be at most 3");
    const std::uint64_t N = g.order();

    // Linear parts up to span: one reduced basis per subspace of the dual.
    std::vector<std::vector<std::vector<FpVector>>> spans(static_cast<std::size_t>(n + 1));
    {
        std::set<std::vector<std::vector<int>>> seen;
        std::function<void(std::vector<FpVector>&, std::uint64_t)> rec = [&](std::vector<FpVector>& cur, std::uint64_t from) {
            auto key = cur.empty() ? std::vector<std::vector<int>>{} : row_reduce(p, rows_of(cur));
            if (key.size() != cur.size() || !seen.insert(key).second) return;
            std::vector<FpVector> basis;
            for (auto& row : key) basis.emplace_back(p, row);
            spans[cur.size()].push_back(basis);
            for (std::uint64_t v = from; v < N; ++v) {
                cur.push_back(g.vector_of(v));
                rec(cur, v + 1);
                cur.pop_back();
            }
        };
        std::vector<FpVector> cur;
        rec(cur, 1);
    }
    // Symmetric matrices up to nonzero scalars: the first nonzero upper entry is 1.
    std::vector<FpSymMatrix> mats;
    const int ue = n * (n + 1) / 2;
    for (std::uint64_t code = 1; code < ipow(static_cast<std::uint64_t>(p), ue); ++code) {
        auto dg = digits_of(code, p, ue);
        int lead = 0;
        while (dg[lead] == 0) ++lead;
        if (dg[lead] != 1) continue;
        FpSymMatrix M(p, n);
        int t = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M.set_sym(i, j, dg[t++]);
        mats.push_back(M);
    }
    std::vector<std::vector<std::uint8_t>> qt;
    for (const auto& M : mats) qt.push_back(quad_table(g, M));

    QuadAtomization res;
    std::vector<std::uint32_t> lin(N), cell(N);
    auto atomic_cells = [&](const std::vector<std::uint32_t>& t, std::uint32_t cells) {
        std::vector<std::uint32_t> sz(cells, 0), hit(cells, 0);
        for (std::uint64_t x = 0; x < N; ++x) ++sz[t[x]], hit[t[x]] += A.contains(x);
        for (std::uint32_t c = 0; c < cells; ++c)
            if (sz[c] && !is_eps_atomic(double(hit[c]) / double(sz[c]), eps)) return false;
        return true;
    };
    for (int cx = 0; cx <= max_complexity; ++cx)
        for (int q = 0; q <= std::min(2, cx); ++q) {
            const int ell = cx - q;
            if (ell > n) continue;
            for (const auto& basis : spans[ell]) {
                std::fill(lin.begin(), lin.end(), 0);
                std::uint32_t mult = 1;
                for (const auto& v : basis) {
                    auto dt = dot_table(g, v);
                    for (std::uint64_t x = 0; x < N; ++x) lin[x] += dt[x] * mult;
                    mult *= static_cast<std::uint32_t>(p);
                }
                const std::uint32_t lcodes = mult;
                auto finish = [&](std::vector<FpSymMatrix> Q) {
                    res.found = true;
                    res.factor = QuadraticFactor(p, n, basis, std::move(Q));
                    res.complexity = cx;
                };
                if (q == 0) {
                    ++res.candidates;
                    if (atomic_cells(lin, lcodes)) return finish({}), res;
                    continue;
                }
                for (std::size_t i = 0; i < mats.size(); ++i) {
                    if (q == 1) {
                        ++res.candidates;
                        for (std::uint64_t x = 0; x < N; ++x) cell[x] = lin[x] + lcodes * qt[i][x];
                        if (atomic_cells(cell, lcodes * p)) return finish({mats[i]}), res;
                        continue;
                    }
                    for (std::size_t j = i + 1; j < mats.size(); ++j) {
                        ++res.candidates;
                        for (std::uint64_t x = 0; x < N; ++x)
                            cell[x] = lin[x] + lcodes * (qt[i][x] + static_cast<std::uint32_t>(p) * qt[j][x]);
                        if (atomic_cells(cell, lcodes * p * p)) return finish({mats[i], mats[j]}), res;
                    }
                }
            }
        }
    return res;
}

// ----------------------------------------------------------- extraction

ExtractionResult fop2_guided_extraction(const GroupSubset& A, const ReducedPair& red, const Witness& copy,
                                        const SearchBudget& budget) {
    const GroupSpec& g = A.spec();
    ExtractionResult out;
    if (copy.kind != WitnessKind::GOODCOPY || copy.role_names.size() != 2 || copy.role_names[1] != "b")
        throw ValidationError("fop2_guided_extraction: needs a good copy of H(k)");
    const int k = copy.k;
    if (k < 1 || k > 2) throw CapacityError("fop2_guided_extraction: k must be 1 or 2");
    if (!red.A1.any()) {
        out.search.status = SearchStatus::NONE;
        out.message = "A1 side is empty";
        return out;
    }
    if (!revalidate_good_copy(copy, red.labels, red.A1, red.A0, &red.HB))
        throw ValidationError("fop2_guided_extraction: good copy does not revalidate against the reduced pair");

    const auto table = label_table(g, red.factor);
    std::vector<std::uint64_t> zero_atom;
    std::vector<std::vector<std::uint64_t>> zdom(static_cast<std::size_t>(k));
    const auto& a = copy.role("a");
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        if (table[x] == 0) zero_atom.push_back(x);
        for (int s = 0; s < k; ++s)
            if (table[x] == a[s]) zdom[s].push_back(x);
    }
    out.atom_sizes = {zero_atom.size(), zero_atom.size()};
    for (const auto& z : zdom) out.atom_sizes.push_back(z.size());
    for (const auto& z : zdom)
        if (z.empty()) {
            out.search.status = SearchStatus::NONE;
            out.message = "an atom of the copy is empty";
            return out;
        }

    // Column functions c : [k] -> [k] (c(i) = f(i, j)), coded base k; required mask has bit (i, s) iff s <= c(i).
    const int ncol = static_cast<int>(ipow(static_cast<std::uint64_t>(k), k));
    std::vector<std::uint32_t> need(static_cast<std::size_t>(ncol));
    for (int c = 0; c < ncol; ++c) {
        std::uint32_t m = 0;
        for (int i = 0; i < k; ++i) {
            const int ci = static_cast<int>(c / ipow(static_cast<std::uint64_t>(k), i) % static_cast<std::uint64_t>(k)) + 1;
            for (int s = 1; s <= k; ++s)
                if (s <= ci) m |= 1U << (i * k + (s - 1));
        }
        need[c] = m;
    }
    const std::size_t X = zero_atom.size();
    std::vector<std::size_t> pos(static_cast<std::size_t>(2 * k), 0);
    std::vector<std::uint64_t> x(static_cast<std::size_t>(k)), z(static_cast<std::size_t>(k)), rep(static_cast<std::size_t>(ncol));
    std::uint64_t work = 0;
    while (true) {
        for (int i = 0; i < k; ++i) x[i] = zero_atom[pos[i]];
        for (int s = 0; s < k; ++s) z[s] = zdom[s][pos[k + s]];
        work += X;
        ++out.search.nodes;
        if (work > budget.node_limit) {
            out.search.status = SearchStatus::BOUND_ONLY;
            out.message = "budget exhausted";
            return out;
        }
        std::vector<std::uint64_t> xz(static_cast<std::size_t>(k * k));
        for (int i = 0; i < k; ++i)
            for (int s = 0; s < k; ++s) xz[i * k + s] = g.add(x[i], z[s]);
        std::fill(rep.begin(), rep.end(), g.order());
        int found = 0;
        for (std::size_t t = 0; t < X && found < ncol; ++t) {
            const std::uint64_t y = zero_atom[t];
            std::uint32_t m = 0;
            for (int b = 0; b < k * k; ++b)
                if (A.contains(g.add(xz[b], y))) m |= 1U << b;
            for (int c = 0; c < ncol; ++c)
                if (need[c] == m && rep[c] == g.order()) rep[c] = y, ++found;
        }
        if (found == ncol) {
            const std::size_t nf = ipow(static_cast<std::uint64_t>(k), k * k);
            std::vector<std::uint64_t> ys(nf * static_cast<std::size_t>(k));
            for (std::size_t f = 0; f < nf; ++f)
                for (int j = 0; j < k; ++j) {
                    int code = 0, mult = 1;
                    for (int i = 0; i < k; ++i) {
                        code += static_cast<int>(f / ipow(static_cast<std::uint64_t>(k), i * k + j) % static_cast<std::size_t>(k)) * mult;
                        mult *= k;
                    }
                    ys[f * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] = rep[code];
                }
            Witness w;
            w.kind = WitnessKind::FOP2;
            w.k = k;
            w.role_names = {"x", "z", "y"};
            w.roles = {x, z, ys};
            if (!revalidate(w, A)) throw Error("fop2_guided_extraction: constructed witness does not revalidate");
            out.search.status = SearchStatus::FOUND;
            out.search.witness = std::move(w);
            out.message = "found";
            return out;
        }
        int t = 2 * k - 1;
        while (t >= 0) {
            const std::size_t lim = t < k ? X : zdom[t - k].size();
            if (++pos[t] < lim) break;
            pos[t--] = 0;
        }
        if (t < 0) break;
    }
    out.search.status = SearchStatus::NONE;
    out.message = "exhausted the prescribed atoms";
    return out;
}

}  // namespace qfa
