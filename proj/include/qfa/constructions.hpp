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

#ifndef QFA_CONSTRUCTIONS_HPP
#define QFA_CONSTRUCTIONS_HPP

#include <vector>

#include "qfa/factors.hpp"
#include "qfa/fp_core.hpp"

namespace qfa {

// Union over i of (H_i + e_i), H_i = {x : x_1 = ... = x_i = 0}.
GroupSubset gs(int n, int p);

// Coordinates are 1-based in the helpers below, matching the usual H_i / e_i indexing.
int first_nonzero(const FpVector& x);  // n for the zero vector

struct GSMetric {
    int lambda = 0;  // largest i with x, y in one coset of H_i
    double d = 1.0;  // 1 / (lambda + 1)
};
GSMetric gs_metric(const FpVector& x, const FpVector& y);
FpVector tau(int i, int alpha, const FpVector& a);  // alpha e_i - a

// Coefficients c_0..c_{n-1} of the monic irreducible x^n + c_{n-1} x^{n-1} + ... + c_0
// with the least code sum c_k p^k.
std::vector<int> least_irreducible(int n, int p);

// n symmetric matrices M_k[i][j] = Tr(t^{i+j+k}) over F_{p^n} = F_p[t]/(f);
// every nontrivial combination has rank n (validated on construction).
std::vector<FpSymMatrix> trace_sym_space(int n, int p);

struct QgsResult {
    GroupSubset set;
    QuadraticFactor factor;
};
QgsResult qgs(int n, int p);

GroupSubset quadric(int n, int p, const FpSymMatrix& M, int c);
GroupSubset standard_quadric(int n, int p, int c);  // x^T x = c

GroupSubset sparse_example(int n, int p);

// Cosets of H = {x : x.v = 0 for all v in H} through the listed representatives.
GroupSubset union_of_cosets(const GroupSpec& g, const LinearFactor& H, const std::vector<FpVector>& reps);
GroupSubset union_of_atoms(const GroupSpec& g, const QuadraticFactor& B, const std::vector<AtomLabel>& labels);

// Trace factor of complexity (ell, q): linear part e_1..e_ell, quadratic part the first q trace matrices.
QuadraticFactor trace_factor(int n, int p, int ell, int q);

struct GsIntersectionCheck {
    int m = 0;
    int mixed_case = 0;  // (A-b) cap (not A - c): 1, 2, 3
    bool mixed_holds = false;
    int ones_case = 0;  // (A-b) cap (A-c): 1, 2, 3
    bool ones_holds = false;
    int zeros_case = 0;  // (not A - b) cap (not A - c): 4, 5, 6
    bool zeros_holds = false;
    int mixed_fired = 0;  // number of case conditions that hold
    int ones_fired = 0;
    int zeros_fired = 0;
    bool holds() const { return mixed_holds && ones_holds && zeros_holds; }
};

// Compares the three translate-intersection identities for GS(n,p) against enumeration.
GsIntersectionCheck verify_gs_intersection(const FpVector& b, const FpVector& c, int n, int p);

}  // namespace qfa

#endif
