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

#include "qfa/factors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace qfa {

namespace {

int mod(long a, int p) {
    long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

std::vector<std::vector<int>> as_rows(const std::vector<FpVector>& vs) {
    std::vector<std::vector<int>> rows;
    for (const auto& v : vs) rows.push_back(v.coords());
    return rows;
}

FpSymMatrix combine(const std::vector<FpSymMatrix>& Q, const std::vector<int>& lambda, int p, int n) {
    FpSymMatrix S(p, n);
    for (std::size_t i = 0; i < Q.size(); ++i)
        if (lambda[i] != 0) S = S + Q[i].scaled(lambda[i]);
    return S;
}

// Visits every nontrivial coefficient tuple whose first nonzero entry is 1.
template <class F>
void for_each_projective(int q, int p, F&& visit) {
    std::vector<int> lam(static_cast<std::size_t>(q), 0);
    std::uint64_t total = 1;
    for (int i = 0; i < q; ++i) total *= static_cast<std::uint64_t>(p);
    for (std::uint64_t c = 1; c < total; ++c) {
        std::uint64_t v = c;
        int lead = -1;
        for (int i = 0; i < q; ++i) {
            lam[i] = static_cast<int>(v % static_cast<std::uint64_t>(p));
            v /= static_cast<std::uint64_t>(p);
            if (lead < 0 && lam[i] != 0) lead = i;
        }
        if (lam[lead] != 1) continue;
        if (!visit(lam)) return;
    }
}

// A nontrivial lambda with sum lambda_i v_i = 0, or empty if the rows are independent.
std::vector<int> find_dependency(int p, const std::vector<std::vector<int>>& rows) {
    const std::size_t m = rows.size();
    if (m == 0) return {};
    const std::size_t w = rows[0].size();
    std::vector<std::vector<int>> aug(m);
    for (std::size_t i = 0; i < m; ++i) {
        aug[i] = rows[i];
        aug[i].resize(w + m, 0);
        aug[i][w + i] = 1;
    }
    auto red = row_reduce(p, aug);
    for (const auto& r : red) {
        bool zero = std::all_of(r.begin(), r.begin() + static_cast<long>(w), [](int v) { return v == 0; });
        if (zero) return std::vector<int>(r.begin() + static_cast<long>(w), r.end());
    }
    return {};
}

std::vector<int> flatten(const FpSymMatrix& M) {
    std::vector<int> v;
    v.reserve(static_cast<std::size_t>(M.n() * M.n()));
    for (int i = 0; i < M.n(); ++i)
        for (int j = 0; j < M.n(); ++j) v.push_back(M.at(i, j));
    return v;
}

}  // namespace

int LinearFactor::complexity() const { return vectors.empty() ? 0 : rank_of_rows(p, as_rows(vectors)); }

QuadraticFactor::QuadraticFactor(int p, int n, std::vector<FpVector> linear, std::vector<FpSymMatrix> quadratic,
                                 std::vector<FpVector> shifts)
    : p_(p), n_(n), linear_(std::move(linear)), quadratic_(std::move(quadratic)), shifts_(std::move(shifts)) {
    for (const auto& v : linear_)
        if (v.size() != n_ || v.p() != p_) throw ShapeError("linear vector does not live in F_p^n");
    for (const auto& M : quadratic_)
        if (M.n() != n_ || M.p() != p_) throw ShapeError("matrix does not live in F_p^n");
    if (!shifts_.empty() && shifts_.size() != quadratic_.size())
        throw ShapeError("general factor needs one shift per matrix");
    for (const auto& u : shifts_)
        if (u.size() != n_) throw ShapeError("shift vector does not live in F_p^n");
}

int QuadraticFactor::ell() const { return linear_factor().complexity(); }

std::uint64_t label_code(const AtomLabel& lab, int p) {
    std::uint64_t code = 0, mult = 1;
    for (int v : lab.a) code += static_cast<std::uint64_t>(v) * mult, mult *= static_cast<std::uint64_t>(p);
    for (int v : lab.b) code += static_cast<std::uint64_t>(v) * mult, mult *= static_cast<std::uint64_t>(p);
    return code;
}

AtomLabel label_of_code(std::uint64_t code, int L, int Q, int p) {
    AtomLabel lab;
    for (int i = 0; i < L; ++i) lab.a.push_back(static_cast<int>(code % static_cast<std::uint64_t>(p))), code /= static_cast<std::uint64_t>(p);
    for (int i = 0; i < Q; ++i) lab.b.push_back(static_cast<int>(code % static_cast<std::uint64_t>(p))), code /= static_cast<std::uint64_t>(p);
    return lab;
}

std::uint64_t label_space_size(const QuadraticFactor& B) {
    std::uint64_t s = 1;
    for (int i = 0; i < B.label_dims(); ++i) {
        s *= static_cast<std::uint64_t>(B.p());
        if (s > (std::uint64_t{1} << 31)) throw CapacityError("label space too large");
    }
    return s;
}

AtomLabel atom_label(const FpVector& x, const QuadraticFactor& B) {
    if (x.size() != B.n()) throw ShapeError("atom_label: dimension mismatch");
    AtomLabel lab;
    for (const auto& v : B.linear()) lab.a.push_back(x.dot(v));
    for (int i = 0; i < B.q(); ++i) {
        int val = quad_eval(B.quadratic()[i], x);
        if (B.general()) val = (val + x.dot(B.shifts()[i])) % B.p();
        lab.b.push_back(val);
    }
    return lab;
}

std::vector<std::uint32_t> label_table(const GroupSpec& g, const QuadraticFactor& B) {
    if (g.p() != B.p() || g.n() != B.n()) throw ShapeError("label_table: factor does not live on this group");
    label_space_size(B);
    std::vector<std::uint32_t> t(g.order(), 0);
    std::uint32_t mult = 1;
    const auto p = static_cast<std::uint32_t>(B.p());
    for (const auto& v : B.linear()) {
        auto dt = dot_table(g, v);
        for (std::uint64_t x = 0; x < g.order(); ++x) t[x] += dt[x] * mult;
        mult *= p;
    }
    for (int i = 0; i < B.q(); ++i) {
        auto qt = quad_table(g, B.quadratic()[i]);
        if (B.general()) {
            auto st = dot_table(g, B.shifts()[i]);
            for (std::uint64_t x = 0; x < g.order(); ++x) qt[x] = static_cast<std::uint8_t>((qt[x] + st[x]) % p);
        }
        for (std::uint64_t x = 0; x < g.order(); ++x) t[x] += qt[x] * mult;
        mult *= p;
    }
    return t;
}

GroupSubset atom_members(const GroupSpec& g, const QuadraticFactor& B, const AtomLabel& lab) {
    if (static_cast<int>(lab.a.size()) != static_cast<int>(B.linear().size()) || static_cast<int>(lab.b.size()) != B.q())
        throw ShapeError("atom label does not match the factor complexity");
    auto t = label_table(g, B);
    const auto code = label_code(lab, B.p());
    return GroupSubset(g, [&](std::uint64_t x) { return t[x] == code; });
}

std::vector<std::uint64_t> atom_sizes(const GroupSpec& g, const QuadraticFactor& B) {
    std::vector<std::uint64_t> sizes(label_space_size(B), 0);
    for (auto c : label_table(g, B)) ++sizes[c];
    return sizes;
}

int factor_rank(const std::vector<FpSymMatrix>& Q) {
    if (Q.empty()) return kInfiniteRank;
    if (static_cast<int>(Q.size()) > kMaxFactorQ)
        throw CapacityError("factor_rank: q = " + std::to_string(Q.size()) + " exceeds the cap of 8");
    const int p = Q[0].p(), n = Q[0].n();
    int best = n;
    for_each_projective(static_cast<int>(Q.size()), p, [&](const std::vector<int>& lam) {
        best = std::min(best, matrix_rank(combine(Q, lam, p, n)));
        return best > 0;
    });
    return best;
}

int factor_rank(const QuadraticFactor& B) { return factor_rank(B.quadratic()); }

bool table_refines(const std::vector<std::uint32_t>& t1, const std::vector<std::uint32_t>& t2) {
    if (t1.size() != t2.size()) throw ShapeError("partitions of different sets");
    std::unordered_map<std::uint32_t, std::uint32_t> m;
    for (std::size_t x = 0; x < t1.size(); ++x) {
        auto [it, fresh] = m.emplace(t1[x], t2[x]);
        if (!fresh && it->second != t2[x]) return false;
    }
    return true;
}

bool same_partition(const std::vector<std::uint32_t>& t1, const std::vector<std::uint32_t>& t2) {
    return table_refines(t1, t2) && table_refines(t2, t1);
}

bool refines(const GroupSpec& g, const QuadraticFactor& B1, const QuadraticFactor& B2) {
    return table_refines(label_table(g, B1), label_table(g, B2));
}

// ------------------------------------------------------------ RankFunction

RankFunction::RankFunction(const std::string& formula) : formula_(formula), a1_(0) {
    std::string s;
    for (char ch : formula)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw ParseError("empty rank function");
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t end = s.find('+', pos);
        if (end == std::string::npos) end = s.size();
        std::string term = s.substr(pos, end - pos);
        if (term.empty()) throw ParseError("rank function '" + formula + "': empty term at position " + std::to_string(pos));
        double coef = 1;
        std::string var = term;
        std::size_t star = term.find('*');
        if (star != std::string::npos) {
            try {
                coef = std::stod(term.substr(0, star));
            } catch (const std::exception&) {
                throw ParseError("rank function '" + formula + "': bad coefficient at position " + std::to_string(pos));
            }
            var = term.substr(star + 1);
        } else if (term.find('x') == std::string::npos) {
            try {
                std::size_t used = 0;
                a0_ += std::stod(term, &used);
                if (used != term.size()) throw ParseError("");
            } catch (const std::exception&) {
                throw ParseError("rank function '" + formula + "': bad constant at position " + std::to_string(pos));
            }
            pos = end + 1;
            continue;
        }
        if (var == "x")
            a1_ += coef;
        else if (var == "x^2" || var == "x*x")
            a2_ += coef;
        else
            throw ParseError("rank function '" + formula + "': unknown term '" + var + "' at position " + std::to_string(pos));
        pos = end + 1;
    }
    if (a1_ < 0 || a2_ < 0 || (a1_ == 0 && a2_ == 0))
        throw ValidationError("rank function '" + formula + "' is not strictly increasing");
}

// ---------------------------------------------------------- make_high_rank

HighRankResult make_high_rank(const QuadraticFactor& B, const RankFunction& r, int C) {
    if (B.ell() + B.q() > C) throw ValidationError("make_high_rank: complexity exceeds the bound C");
    if (B.general()) throw ValidationError("make_high_rank expects a pure quadratic factor");
    if (B.q() > kMaxFactorQ) throw CapacityError("make_high_rank: q exceeds the cap of 8");
    const int p = B.p(), n = B.n();
    std::vector<FpVector> lin = B.linear();
    std::vector<FpSymMatrix> Q = B.quadratic();
    HighRankResult res;
    while (true) {
        int complexity = LinearFactor{p, n, lin}.complexity() + static_cast<int>(Q.size());
        res.target = r(complexity);
        if (Q.empty()) break;
        std::vector<int> worst;
        int worst_rank = kInfiniteRank;
        for_each_projective(static_cast<int>(Q.size()), p, [&](const std::vector<int>& lam) {
            int rk = matrix_rank(combine(Q, lam, p, n));
            if (rk < worst_rank) worst_rank = rk, worst = lam;
            return rk > 0;
        });
        if (static_cast<double>(worst_rank) >= res.target) break;
        // Delete the highest-index matrix in the low-rank combination S; x^T S x is a function of
        // x.(rows of S), so adding a row basis of S keeps the dropped value measurable.
        int j = static_cast<int>(Q.size()) - 1;
        while (worst[j] == 0) --j;
        FpSymMatrix S = combine(Q, worst, p, n);
        std::vector<std::vector<int>> srows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) srows[i].push_back(S.at(i, c));
        auto basis = row_reduce(p, srows);
        for (auto& row : basis) {
            auto cand = as_rows(lin);
            int before = cand.empty() ? 0 : rank_of_rows(p, cand);
            cand.push_back(row);
            if (rank_of_rows(p, cand) > before) lin.emplace_back(p, row);
        }
        Q.erase(Q.begin() + j);
        ++res.steps;
    }
    res.factor = QuadraticFactor(p, n, lin, Q);
    res.rank = factor_rank(Q);
    return res;
}

// ------------------------------------------------------ pad_with_high_rank

PadResult pad_with_high_rank(const QuadraticFactor& Q, const std::vector<FpSymMatrix>& S, int qprime) {
    const int n = Q.n();
    PadResult res;
    if (qprime < 0) throw ValidationError("pad_with_high_rank: negative count");
    if (static_cast<int>(S.size()) > kMaxFactorQ) throw CapacityError("pad_with_high_rank: family too large to validate");
    if (factor_rank(S) != n) throw ValidationError("pad_with_high_rank: the family S does not have rank n");
    if (Q.q() + qprime > kMaxFactorQ) throw CapacityError("pad_with_high_rank: q + q' exceeds the cap of 8");
    res.target_rank = std::min(factor_rank(Q), n);
    std::vector<FpSymMatrix> cur = Q.quadratic();
    std::vector<int> chosen;
    std::function<bool(int)> dfs = [&](int from) {
        if (static_cast<int>(chosen.size()) == qprime) return true;
        for (int i = from; i < static_cast<int>(S.size()); ++i) {
            cur.push_back(S[i]);
            chosen.push_back(i);
            if (factor_rank(cur) >= res.target_rank && dfs(i + 1)) return true;
            cur.pop_back();
            chosen.pop_back();
        }
        return false;
    };
    res.found = dfs(0);
    if (res.found) {
        res.chosen = chosen;
        res.factor = QuadraticFactor(Q.p(), n, Q.linear(), cur);
    }
    return res;
}

// --------------------------------------------------------- pullback_factor

PullbackResult pullback_factor(const QuadraticFactor& B, const std::vector<std::vector<int>>& R) {
    if (B.general()) throw ValidationError("pullback_factor expects a pure quadratic factor");
    const int p = B.p(), n = B.n();
    const int L = static_cast<int>(B.linear().size()), Qn = B.q();
    std::vector<FpVector> lin;
    std::vector<FpSymMatrix> mats;
    std::vector<FpVector> shifts;
    for (const auto& r : R) {
        if (static_cast<int>(r.size()) != L + Qn) throw ShapeError("pullback_factor: R does not live on the label space");
        FpVector t(p, n);
        for (int i = 0; i < L; ++i) t = t + B.linear()[i].scaled(r[i]);
        FpSymMatrix M(p, n);
        for (int j = 0; j < Qn; ++j) M = M + B.quadratic()[j].scaled(r[L + j]);
        mats.push_back(M);
        shifts.push_back(t);
    }
    PullbackResult res;
    while (!mats.empty()) {
        std::vector<std::vector<int>> flat;
        for (const auto& M : mats) flat.push_back(flatten(M));
        auto lam = find_dependency(p, flat);
        if (lam.empty()) break;
        // sum lam_a (x^T M^a x + x.t^a) = x.(sum lam_a t^a): the pair i is recovered from a linear label.
        int i = static_cast<int>(mats.size()) - 1;
        while (lam[i] == 0) --i;
        FpVector v(p, n);
        for (std::size_t a = 0; a < mats.size(); ++a) v = v + shifts[a].scaled(lam[a]);
        lin.push_back(v.scaled(inv_mod(lam[i], p)));
        mats.erase(mats.begin() + i);
        shifts.erase(shifts.begin() + i);
        ++res.reductions;
    }
    std::vector<FpVector> kept;
    for (const auto& v : lin) {
        if (v.is_zero()) continue;
        auto rows = as_rows(kept);
        int before = rows.empty() ? 0 : rank_of_rows(p, rows);
        rows.push_back(v.coords());
        if (rank_of_rows(p, rows) > before) kept.push_back(v);
    }
    if (mats.empty()) {
        res.lemma_case = 2;
        res.factor = QuadraticFactor(p, n, kept);
    } else {
        res.lemma_case = 1;
        res.rank = static_cast<int>(mats.size()) <= kMaxFactorQ ? factor_rank(mats) : -1;
        res.factor = QuadraticFactor(p, n, kept, mats, shifts);
    }
    return res;
}

std::vector<std::uint32_t> pullback_partition_table(const GroupSpec& g, const QuadraticFactor& B,
                                                    const std::vector<std::vector<int>>& R) {
    const int p = B.p();
    const int dims = B.label_dims();
    auto base = label_table(g, B);
    std::uint64_t classes = 1;
    for (std::size_t i = 0; i < R.size(); ++i) {
        classes *= static_cast<std::uint64_t>(p);
        if (classes > (std::uint64_t{1} << 31)) throw CapacityError("pullback_partition_table: too many classes");
    }
    std::vector<std::uint32_t> t(g.order());
    for (std::uint64_t x = 0; x < g.order(); ++x) {
        auto lab = label_of_code(base[x], static_cast<int>(B.linear().size()), B.q(), p);
        std::vector<int> flat = lab.a;
        flat.insert(flat.end(), lab.b.begin(), lab.b.end());
        std::uint32_t code = 0, mult = 1;
        for (const auto& r : R) {
            long s = 0;
            for (int i = 0; i < dims; ++i) s += static_cast<long>(r[i]) * flat[i];
            code += static_cast<std::uint32_t>(mod(s, p)) * mult;
            mult *= static_cast<std::uint32_t>(p);
        }
        t[x] = code;
    }
    return t;
}

}  // namespace qfa
