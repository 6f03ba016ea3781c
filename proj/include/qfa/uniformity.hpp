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

#ifndef QFA_UNIFORMITY_HPP
#define QFA_UNIFORMITY_HPP

#include <array>
#include <string>
#include <vector>

#include "qfa/detectors.hpp"
#include "qfa/factors.hpp"
#include "qfa/fp_core.hpp"

namespace qfa {

struct MeasureReport {
    std::string name;
    double measured = 0;
    double bound = 0;
    std::string bound_formula;
    bool pass = false;
    std::string detail;
};

// ------------------------------------------------------------------ norms

std::vector<Complex> to_complex(const std::vector<double>& f);
std::vector<double> indicator(const GroupSubset& A);
std::vector<double> balanced(const GroupSubset& A);  // 1_A - density

double u2_norm(const GroupSpec& g, const std::vector<Complex>& f);
double u3_norm(const GroupSpec& g, const std::vector<Complex>& f);
double fourier_l4(const GroupSpec& g, const std::vector<Complex>& f);   // sum_t |f^(t)|^4
double fourier_linf(const GroupSpec& g, const std::vector<Complex>& f); // max_t |f^(t)|
// E_{x,a,b,c} prod_e C^{|e|} f_e(x + e.(a,b,c)), e in {0,1}^3 with e_1 the least significant bit.
Complex gowers_inner(const GroupSpec& g, const std::array<std::vector<Complex>, 8>& f);

// ------------------------------------------------------------- sum graphs

struct SumGraph2 {
    const GroupSubset* A;
    bool edge(std::uint64_t x, std::uint64_t y) const { return A->contains(A->spec().add(x, y)); }
};
struct SumGraph3 {
    const GroupSubset* A;
    bool edge(std::uint64_t x, std::uint64_t y, std::uint64_t z) const {
        const GroupSpec& g = A->spec();
        return A->contains(g.add(g.add(x, y), z));
    }
};
inline SumGraph2 sum_graph2(const GroupSubset& A) { return {&A}; }
inline SumGraph3 sum_graph3(const GroupSubset& A) { return {&A}; }

// ----------------------------------------------------------------- triads

// Two atoms and one pair value (binary), or three atoms and pair values in the order 12, 13, 23.
struct TriadDescriptor {
    std::vector<AtomLabel> atoms;
    std::vector<std::vector<int>> pairs;
    bool ternary() const { return atoms.size() == 3; }
};

// Sigma_L = sum a_i; Sigma_Q = sum b_i + 2 sum b_ij (binary: b_1 + b_2 + 2 b_12).
AtomLabel sigma(const TriadDescriptor& d, int p);

struct BipartiteGraph {
    std::size_t nu = 0, nv = 0;
    std::vector<char> adj;  // row-major nu x nv
    bool edge(std::size_t u, std::size_t v) const { return adj[u * nv + v] != 0; }
    std::uint64_t edges() const;
};

struct Triad {
    std::vector<std::vector<std::uint64_t>> parts;  // group indices of each atom
    std::vector<BipartiteGraph> graphs;             // binary: {01}; ternary: {01, 02, 12}
};

// beta(b) between two vertex lists: x^T M_i y = b_i for every quadratic matrix.
BipartiteGraph beta_graph(const GroupSpec& g, const QuadraticFactor& B, const std::vector<int>& b,
                          const std::vector<std::uint64_t>& X, const std::vector<std::uint64_t>& Y);
Triad build_triad(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d);
std::vector<BipartiteGraph> triad_graphs(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d);

// Every edge (binary) or triangle (ternary) of the triad has its sum in B(sigma). Returns the
// number of checked tuples; throws ValidationError on a violation.
std::uint64_t check_triad_membership(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d);

// --------------------------------------------------------- quasirandomness

struct Dev2Result {
    double eps = 0;  // deviation sum / (|U|^2 |V|^2)
    double d2 = 0;
    bool has(double e) const { return eps <= e; }
    bool has(double e, double d) const { return eps <= e && d2 > d - e && d2 < d + e; }
};
Dev2Result dev2_measure(const BipartiteGraph& G);

// Dense f on U x V x W, index (u * nv + v) * nw + w.
struct Tensor3 {
    std::size_t nu = 0, nv = 0, nw = 0;
    std::vector<double> f;
    double at(std::size_t u, std::size_t v, std::size_t w) const { return f[(u * nv + v) * nw + w]; }
};
double oct_sum(const Tensor3& t);

std::uint64_t triangle_count(const Triad& t);

// h_{H,G}: 1 - d3 on hyperedges, -d3 on other triangles, 0 elsewhere; H = E_A^(3) restricted to the triad.
struct Dev23Result {
    double eps1 = 0;      // oct(h) / (d2^12 prod |V_i|^2)
    double oct = 0;       // raw octahedron sum
    double d2 = 0;        // mean of the three pair densities
    double d2_spread = 0; // max |d_ij - d2|
    double eps2 = 0;      // max pair dev2
    double d3 = 0;
    std::uint64_t triangles = 0;
    bool has(double e1, double e2) const;
};
Dev23Result dev23_measure(const Triad& t, const GroupSubset& A);

// oct(f^A_d) with alpha = density of A on B(sigma(d)).
double oct_measure(const GroupSpec& g, const QuadraticFactor& B, const TriadDescriptor& d, const GroupSubset& A);

// |relative density of E_A on the triad - density of A on B(sigma)|.
MeasureReport density_transfer_check(const GroupSubset& A, const QuadraticFactor& B, const TriadDescriptor& d,
                                     double bound = 0.05);

struct TransferSweep {
    double max_diff = 0;
    double mean_diff = 0;  // weighted by edge count
    std::uint64_t descriptors = 0;
    TriadDescriptor worst;
};
// All binary descriptors in one pass over G x G.
TransferSweep density_transfer_sweep(const GroupSubset& A, const QuadraticFactor& B);

// K_{2,2,2}[u0, v0, w0] over a ternary triad; u0, v0, w0 are positions within the parts.
std::uint64_t k222_count(const Triad& t, std::size_t u0, std::size_t v0, std::size_t w0);
// Triangle count against the product of the measured pair densities; pass iff the ratio is in [1 - tol, 1 + tol].
MeasureReport hom_count_check(const Triad& t, double tol);

// ----------------------------------------------------------- reduced pairs

struct ReducedPair {
    QuadraticFactor factor;
    double eps = 0;
    GroupSpec labels;  // F_p^{L+Q}, indexed by label code
    Bitset A1, A0, err;
    Bitset HB;  // labels with zero linear part
    std::vector<double> density;
    std::vector<std::uint64_t> size;
};
ReducedPair reduced_pair(const GroupSubset& A, const QuadraticFactor& B, double eps);

SearchResult find_good_copy(const ReducedPair& red, CopyPattern pattern, int k, bool right_in_HB,
                            const SearchBudget& budget = {});

// Vertex partition At(B), edge partition by beta classes; the fraction of triples lying in
// triads with dev_{2,3}(eps1, eps2). Triads are visited exhaustively when there are at most
// max_triads of them, otherwise through `samples` uniformly random triples.
MeasureReport hypergraph_decomposition_check(const GroupSubset& A, const QuadraticFactor& B, double eps1, double eps2,
                                             std::size_t max_triads = 64, std::size_t samples = 48,
                                             std::uint64_t seed = 0xF0F2);

}  // namespace qfa

#endif
