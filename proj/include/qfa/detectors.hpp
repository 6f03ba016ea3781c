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

#ifndef QFA_DETECTORS_HPP
#define QFA_DETECTORS_HPP

#include <functional>
#include <string>
#include <vector>

#include "qfa/fp_core.hpp"

namespace qfa {

enum class WitnessKind { OP, HOP2, FOP2, VC, VC2, TREE, GOODCOPY };
std::string to_string(WitnessKind k);

/*
 * Role layouts (all entries are group indices):
 *   OP       a[k], b[k]                 a_i + b_j in A iff i <= j
 *   HOP2     a[k], b[k], c[k]           a_u + b_v + c_w in A iff u < v + w
 *   FOP2     x[k], z[k], y[k^(k*k) * k] y[f * k + j]; f is a base-k code of f(i,j) - 1 at digit (i-1)k + (j-1)
 *                                       x_i + y^f_j + z_s in A iff s <= f(i,j)
 *   VC       a[k], b[2^k]               a_i + b_S in A iff bit i-1 of S
 *   VC2      b[k], c[k], a[2^(k*k)]     b_i + c_j + a_S in A iff bit (i-1)k + (j-1) of S
 *   TREE     nodes[2^d - 1], leaves[2^d] heap order; node of string s at 2^|s| - 1 + value(s)
 *   GOODCOPY a[k], b[k]                 labels; a_i + b_j in A1 iff i <= j, else in A0
 */
struct Witness {
    WitnessKind kind = WitnessKind::OP;
    int k = 0;  // depth d for TREE
    std::vector<std::string> role_names;
    std::vector<std::vector<std::uint64_t>> roles;

    const std::vector<std::uint64_t>& role(const std::string& name) const;
};

// Independent re-check of every membership constraint.
bool revalidate(const Witness& w, const GroupSubset& A);
// GOODCOPY and label-space OP patterns: in/out are A1/A0 over the label group.
bool revalidate_good_copy(const Witness& w, const GroupSpec& labels, const Bitset& A1, const Bitset& A0,
                          const Bitset* side);

enum class SearchStatus { FOUND, NONE, BOUND_ONLY };
std::string to_string(SearchStatus s);

struct SearchBudget {
    std::uint64_t node_limit = 4'000'000'000ULL;
    bool symmetry = true;  // translation pins
};

struct SearchResult {
    SearchStatus status = SearchStatus::NONE;
    Witness witness;
    std::uint64_t nodes = 0;
};

SearchResult find_op(const GroupSubset& A, int k, const SearchBudget& budget = {});
SearchResult find_hop2(const GroupSubset& A, int k, const SearchBudget& budget = {});
SearchResult find_fop2(const GroupSubset& A, int k, const SearchBudget& budget = {});
SearchResult find_vc(const GroupSubset& A, int k, const SearchBudget& budget = {});
SearchResult find_vc2(const GroupSubset& A, int k, const SearchBudget& budget = {});

struct DimensionResult {
    int dim = 0;
    bool exact = true;  // false: budget ran out, dim is a lower bound
    Witness witness;
    std::uint64_t nodes = 0;
};
DimensionResult vc_dim(const GroupSubset& A, int kmax, const SearchBudget& budget = {});
DimensionResult vc2_dim(const GroupSubset& A, int kmax, const SearchBudget& budget = {});

struct Cap2Result {
    SearchStatus status = SearchStatus::NONE;  // NONE: the property holds
    bool holds = true;
    std::vector<std::uint64_t> cube;  // x1, x2, y1, y2, z1, z2 with x2 + y2 + z2 the missing sum
    std::uint64_t nodes = 0;
};
Cap2Result cap2_check(const GroupSubset& A, const SearchBudget& budget = {});

// Exact number of encodings of T(d): branch constraints in/out of A; with good = true every sum
// (also off-branch) must lie in A1 or A0, where A1 = in and A0 = out.
u128 count_tree_encodings(const GroupSpec& g, const Bitset& in, const Bitset& out, int d, const Bitset& leaves_in,
                          const Bitset& nodes_in, bool good = false, std::uint64_t node_limit = 2'000'000'000ULL);
u128 count_tree_encodings(const GroupSubset& A, int d, const Bitset& leaves_in, const Bitset& nodes_in);

// Some encoding of T(d) with leaves and nodes in the given sets, or status NONE/BOUND_ONLY.
SearchResult find_tree_encoding(const GroupSpec& g, const Bitset& in, const Bitset& out, int d, const Bitset& leaves_in,
                                const Bitset& nodes_in, bool good = false, const SearchBudget& budget = {});

// Copy of H(k) (OP pattern) with nodes on the left and leaves on the right.
struct HodgesResult {
    bool ok = false;
    Witness op;  // kind OP: a = c_i (nodes), b = b_j (leaves)
    std::string message;
};
HodgesResult hodges_extract(const Witness& tree, const GroupSubset& A, int k);
int hodges_depth(int k);  // 2^{k+2} - 2

enum class CopyPattern { H, U };
// Good copy of H(k) (a_i + b_j in A1 iff i <= j, else in A0) or U(k) (a_i + b_S in A1 iff i in S)
// in the label group; the right side (b) is restricted to `side` when given.
SearchResult find_good_copy(const GroupSpec& labels, const Bitset& A1, const Bitset& A0, CopyPattern pattern, int k,
                            const Bitset* side, const SearchBudget& budget = {});
u128 count_good_copies(const GroupSpec& labels, const Bitset& A1, const Bitset& A0, int k, const Bitset* side,
                       std::uint64_t node_limit = 2'000'000'000ULL);

struct AffineEmbedding {
    bool found = false;
    std::uint64_t shift = 0;                // f(0)
    std::vector<std::uint64_t> basis_image;  // L(e_i)
};
// f(x) = f(0) + L(x), L injective linear, with x in A_H iff f(x) in A_G.
AffineEmbedding affine_embedding_exists(const GroupSubset& AH, const GroupSubset& AG,
                                        std::uint64_t node_limit = 100'000'000ULL);

// ------------------------------------------------------------- transforms

// l-HOP2 of A -> floor(l/2)-HOP2 of not A.
Witness hop_complement(const Witness& w);
// l-HOP2 -> l-OP.
Witness hop_to_op(const GroupSpec& g, const Witness& w);
// l-FOP2 of A -> (l-1)-FOP2 of not A (l >= 2).
Witness fop_complement(const Witness& w);
// l-FOP2 -> shattered set of size l (l >= 2).
Witness fop_to_vc(const GroupSpec& g, const Witness& w);
// VC2 >= l -> l-FOP2.
Witness vc2_to_fop(const Witness& w);

}  // namespace qfa

#endif
