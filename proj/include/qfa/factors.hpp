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

#ifndef QFA_FACTORS_HPP
#define QFA_FACTORS_HPP

#include <climits>
#include <functional>
#include <string>
#include <vector>

#include "qfa/fp_core.hpp"

namespace qfa {

inline constexpr int kInfiniteRank = INT_MAX;
inline constexpr int kMaxFactorQ = 8;

struct LinearFactor {
    int p = 3;
    int n = 0;
    std::vector<FpVector> vectors;

    int complexity() const;  // dim span(vectors)
};

/*
 * (L, Q) with labels a_j = x.v_j and b_i = x^T M_i x (+ x.u_i when shifts are present).
 * A factor with non-empty shifts is a general quadratic factor.
 */
class QuadraticFactor {
   public:
    QuadraticFactor() = default;
    QuadraticFactor(int p, int n, std::vector<FpVector> linear = {}, std::vector<FpSymMatrix> quadratic = {},
                    std::vector<FpVector> shifts = {});

    int p() const { return p_; }
    int n() const { return n_; }
    const std::vector<FpVector>& linear() const { return linear_; }
    const std::vector<FpSymMatrix>& quadratic() const { return quadratic_; }
    const std::vector<FpVector>& shifts() const { return shifts_; }
    bool general() const { return !shifts_.empty(); }

    int ell() const;  // dim span of the linear part
    int q() const { return static_cast<int>(quadratic_.size()); }
    int label_dims() const { return static_cast<int>(linear_.size()) + q(); }
    LinearFactor linear_factor() const { return {p_, n_, linear_}; }

   private:
    int p_ = 3;
    int n_ = 0;
    std::vector<FpVector> linear_;
    std::vector<FpSymMatrix> quadratic_;
    std::vector<FpVector> shifts_;
};

using GeneralQuadraticFactor = QuadraticFactor;

struct AtomLabel {
    std::vector<int> a;
    std::vector<int> b;
    bool operator==(const AtomLabel&) const = default;
};

// Codes are base-p integers over (a_1..a_L, b_1..b_Q), a_1 least significant.
std::uint64_t label_code(const AtomLabel& lab, int p);
AtomLabel label_of_code(std::uint64_t code, int L, int Q, int p);
std::uint64_t label_space_size(const QuadraticFactor& B);

AtomLabel atom_label(const FpVector& x, const QuadraticFactor& B);
std::vector<std::uint32_t> label_table(const GroupSpec& g, const QuadraticFactor& B);
GroupSubset atom_members(const GroupSpec& g, const QuadraticFactor& B, const AtomLabel& lab);
std::vector<std::uint64_t> atom_sizes(const GroupSpec& g, const QuadraticFactor& B);

int factor_rank(const std::vector<FpSymMatrix>& Q);
int factor_rank(const QuadraticFactor& B);

// True iff the partition by t1 refines the partition by t2.
bool table_refines(const std::vector<std::uint32_t>& t1, const std::vector<std::uint32_t>& t2);
bool same_partition(const std::vector<std::uint32_t>& t1, const std::vector<std::uint32_t>& t2);
bool refines(const GroupSpec& g, const QuadraticFactor& B1, const QuadraticFactor& B2);

// Strictly increasing map given by a small formula: "c", "c*x", "c*x+d", "x^2", "c*x^2".
class RankFunction {
   public:
    RankFunction() : RankFunction("x") {}
    explicit RankFunction(const std::string& formula);
    double operator()(double x) const { return a2_ * x * x + a1_ * x + a0_; }
    const std::string& formula() const { return formula_; }

   private:
    std::string formula_;
    double a2_ = 0, a1_ = 1, a0_ = 0;
};

struct HighRankResult {
    QuadraticFactor factor;
    int rank = kInfiniteRank;
    double target = 0;
    int steps = 0;  // matrices deleted
};

HighRankResult make_high_rank(const QuadraticFactor& B, const RankFunction& r, int C);

struct PadResult {
    bool found = false;
    QuadraticFactor factor;
    std::vector<int> chosen;  // indices into S
    int target_rank = 0;
};

PadResult pad_with_high_rank(const QuadraticFactor& Q, const std::vector<FpSymMatrix>& S, int qprime);

struct PullbackResult {
    GeneralQuadraticFactor factor;
    int lemma_case = 0;  // 1: quadratic part survives, rank >= rank(B); 2: purely linear
    int rank = kInfiniteRank;
    int reductions = 0;
};

// R: vectors in F_p^{L+Q} over the label coordinates of B.
PullbackResult pullback_factor(const QuadraticFactor& B, const std::vector<std::vector<int>>& R);
// Class of x in X_R, coded as the tuple (r_alpha . label(x)).
std::vector<std::uint32_t> pullback_partition_table(const GroupSpec& g, const QuadraticFactor& B,
                                                    const std::vector<std::vector<int>>& R);

}  // namespace qfa

#endif
