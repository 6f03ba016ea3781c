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

// Internal: backtracking over sum patterns. Not installed.

#ifndef QFA_SRC_SEARCH_ENGINE_HPP
#define QFA_SRC_SEARCH_ENGINE_HPP

#include <array>
#include <functional>
#include <vector>

#include "qfa/detectors.hpp"
#include "qfa/fp_core.hpp"

namespace qfa::detail {

// in(s) = {x : x + s in IN}, out(s) = {x : x + s in OUT}. Cached per s for small groups; otherwise
// computed into a ring of scratch slots, so a returned reference survives the next 15 calls.
class Translates {
   public:
    Translates(const GroupSpec& g, const Bitset& in, const Bitset& out) : g_(g), in_(in), out_(out) {
        cached_ = g.order() <= (std::uint64_t{1} << 13);
        if (cached_) {
            cin_.resize(g.order());
            cout_.resize(g.order());
            have_in_.assign(g.order(), 0);
            have_out_.assign(g.order(), 0);
        }
    }
    const Bitset& in(std::uint64_t s) { return get(s, in_, cin_, have_in_); }
    const Bitset& out(std::uint64_t s) { return get(s, out_, cout_, have_out_); }

   private:
    const Bitset& get(std::uint64_t s, const Bitset& base, std::vector<Bitset>& cache, std::vector<char>& have) {
        if (cached_) {
            if (!have[s]) {
                cache[s] = shift(base, s);
                have[s] = 1;
            }
            return cache[s];
        }
        Bitset& slot = ring_[next_slot_];
        next_slot_ = (next_slot_ + 1) % ring_.size();
        slot = shift(base, s);
        return slot;
    }
    Bitset shift(const Bitset& base, std::uint64_t s) const {
        Bitset r(g_.order());
        for (auto m = base.next(0); m < base.size(); m = base.next(m + 1)) r.set(g_.sub(m, s));
        return r;
    }

    const GroupSpec& g_;
    Bitset in_, out_;
    bool cached_ = false;
    std::vector<Bitset> cin_, cout_;
    std::vector<char> have_in_, have_out_;
    std::array<Bitset, 16> ring_;
    std::size_t next_slot_ = 0;
};

// want(idx) with idx[r] the 0-based index in role r: 1 = sum in IN, 0 = sum in OUT, -1 = free.
struct Pattern {
    int arity = 2;
    std::vector<int> sizes;
    std::function<int(const int*)> want;
};

class Engine {
   public:
    Engine(const GroupSpec& g, Translates& tr, Pattern pat, std::vector<Bitset> domains, std::vector<bool> pins,
           const SearchBudget& budget)
        : g_(g), tr_(tr), pat_(std::move(pat)), dom_(std::move(domains)), pins_(std::move(pins)), budget_(budget) {
        const int R = static_cast<int>(pat_.sizes.size());
        if (R != pat_.arity) throw ValidationError("pattern arity does not match role count");
        int mx = 0;
        for (int s : pat_.sizes) mx = std::max(mx, s);
        for (int t = 0; t < mx; ++t)
            for (int r = 0; r < R; ++r)
                if (t < pat_.sizes[r]) order_.push_back({r, t});
        vals_.resize(R);
        set_.resize(R);
        for (int r = 0; r < R; ++r) {
            vals_[r].assign(pat_.sizes[r], 0);
            set_[r].assign(pat_.sizes[r], 0);
        }
        pins_.resize(R, false);
    }

    SearchStatus find(std::vector<std::vector<std::uint64_t>>& sol) {
        nodes_ = 0;
        over_ = false;
        counting_ = false;
        if (dfs(0)) {
            sol = vals_;
            return SearchStatus::FOUND;
        }
        return over_ ? SearchStatus::BOUND_ONLY : SearchStatus::NONE;
    }

    u128 count(SearchStatus& st) {
        nodes_ = 0;
        over_ = false;
        counting_ = true;
        total_ = 0;
        dfs(0);
        st = over_ ? SearchStatus::BOUND_ONLY : SearchStatus::FOUND;
        return total_;
    }

    std::uint64_t nodes() const { return nodes_; }

   private:
    Bitset candidates(int r, int t) {
        Bitset c = dom_[r];
        if (pins_[r] && t == 0) {
            bool zero = c.test(0);
            c = Bitset(g_.order());
            if (zero) c.set(0);
        }
        const int R = pat_.arity;
        int idx[3] = {0, 0, 0};
        idx[r] = t;
        if (R == 2) {
            const int o = 1 - r;
            for (int u = 0; u < pat_.sizes[o] && c.any(); ++u) {
                if (!set_[o][u]) continue;
                idx[o] = u;
                int w = pat_.want(idx);
                if (w == 1) c &= tr_.in(vals_[o][u]);
                else if (w == 0) c &= tr_.out(vals_[o][u]);
            }
        } else {
            const int o1 = r == 0 ? 1 : 0, o2 = r == 2 ? 1 : 2;
            for (int u = 0; u < pat_.sizes[o1] && c.any(); ++u) {
                if (!set_[o1][u]) continue;
                idx[o1] = u;
                for (int v = 0; v < pat_.sizes[o2] && c.any(); ++v) {
                    if (!set_[o2][v]) continue;
                    idx[o2] = v;
                    int w = pat_.want(idx);
                    if (w < 0) continue;
                    std::uint64_t s = g_.add(vals_[o1][u], vals_[o2][v]);
                    if (w == 1) c &= tr_.in(s);
                    else c &= tr_.out(s);
                }
            }
        }
        return c;
    }

    bool dfs(std::size_t depth) {
        if (depth == order_.size()) return true;
        auto [r, t] = order_[depth];
        Bitset c = candidates(r, t);
        if (counting_ && depth + 1 == order_.size()) {
            total_ += c.count();
            return false;
        }
        for (auto v = c.next(0); v < c.size(); v = c.next(v + 1)) {
            if (++nodes_ > budget_.node_limit) {
                over_ = true;
                return false;
            }
            vals_[r][t] = v;
            set_[r][t] = 1;
            bool done = dfs(depth + 1);
            set_[r][t] = 0;
            if (done) {
                vals_[r][t] = v;
                return true;
            }
            if (over_) return false;
        }
        return false;
    }

    const GroupSpec& g_;
    Translates& tr_;
    Pattern pat_;
    std::vector<Bitset> dom_;
    std::vector<bool> pins_;
    SearchBudget budget_;
    std::vector<std::pair<int, int>> order_;
    std::vector<std::vector<std::uint64_t>> vals_;
    std::vector<std::vector<char>> set_;
    std::uint64_t nodes_ = 0;
    bool over_ = false, counting_ = false;
    u128 total_ = 0;
};

}  // namespace qfa::detail

#endif
