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

#ifndef QFA_REGULARIZE_HPP
#define QFA_REGULARIZE_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qfa/detectors.hpp"
#include "qfa/factors.hpp"
#include "qfa/fp_core.hpp"
#include "qfa/uniformity.hpp"

namespace qfa {

// ---------------------------------------------------------------- atomicity

// A partition is a table part[x] over the group; parts with no elements are ignored.
struct AtomicityVerdict {
    double eps = 0, delta = 0;
    std::uint64_t group_order = 0;
    std::vector<std::uint32_t> near1, near0, err;  // part ids
    std::vector<double> density;                   // indexed by part id; 0 for empty parts
    std::vector<std::uint64_t> size;
    std::uint64_t err_mass = 0;  // elements covered by error parts

    std::uint64_t err_count() const { return err.size(); }
    double err_fraction() const { return group_order ? double(err_mass) / double(group_order) : 0.0; }
    bool atomic() const { return err.empty(); }
    bool almost() const { return double(err_mass) <= delta * double(group_order); }
};

// X is eps-atomic iff its density lies in [0, eps) or (1 - eps, 1].
bool is_eps_atomic(double density, double eps);

AtomicityVerdict atomicity_check(const std::vector<std::uint32_t>& partition, const GroupSubset& A, double eps,
                                 double delta);

struct AqaleVerdict {
    AtomicityVerdict cells;             // partition by L cap Q
    std::uint64_t linear_atoms = 0;     // p^ell
    std::vector<std::uint64_t> sigma;   // linear atoms holding a non-atomic cell
    double bound = 0;                   // delta p^ell
    bool pass = false;
    // Linear atoms containing a cell with density in (1/(2p), 1 - 1/(2p)).
    std::uint64_t mid_linear_atoms = 0;
    bool every_linear_atom_mid() const { return mid_linear_atoms == linear_atoms; }
};
AqaleVerdict aqale_check(const QuadraticFactor& B, const GroupSubset& A, double eps, double delta);

struct StabilityReport {
    bool precondition = false;
    std::string message;
    AtomicityVerdict coarse, fine;  // coarse at (eps, eps), fine at (2 sqrt eps, 2 sqrt eps)
    bool holds = false;             // coarse almost-atomic implies fine almost-atomic
};
// The fine partition must refine the coarse one, with mu < eps/2, coarse parts of equal size up to
// mu|X|/t and, inside each coarse part, s fine parts of equal size up to mu|X|/(ts).
StabilityReport refinement_stability_check(const std::vector<std::uint32_t>& coarse,
                                           const std::vector<std::uint32_t>& fine, const GroupSubset& A,
                                           double eps, double mu);

// ----------------------------------------------------------- growth functions

// Monotone non-decreasing integer map given as a sum of terms "c", "c*x", "x", "x^2", "c*x^2".
class GrowthFunction {
   public:
    GrowthFunction() : GrowthFunction("x") {}
    explicit GrowthFunction(const std::string& formula);
    long long operator()(long long x) const;
    const std::string& formula() const { return formula_; }

   private:
    std::string formula_;
    long long a2_ = 0, a1_ = 1, a0_ = 0;
};

// ----------------------------------------------------------- uniform cosets

// Subspace H = {x : x.v = 0 for v in H.vectors}; a coset is H + y.
struct CosetResult {
    LinearFactor sub;   // H' as the vectors of H plus the new ones
    std::uint64_t y = 0;
    int codim = 0;      // codimension of H' in H
    double density = 0;       // |A cap (H' + y)| / |H'|
    double base_density = 0;  // |A cap H| / |H|
    double uniformity = 0;    // max nontrivial Fourier coefficient of 1_A - density on H' + y
};

// Largest-coefficient refinement, densest coset, ties to the least index. Throws Error when a
// postcondition fails.
CosetResult find_uniform_dense_coset(const GroupSubset& A, const LinearFactor& H, double eps);

// Max nontrivial Fourier coefficient of the localized balanced function of A on H + y.
double coset_uniformity(const GroupSubset& A, const LinearFactor& H, std::uint64_t y);

std::vector<std::uint64_t> subspace_members(const GroupSpec& g, const LinearFactor& H);

struct EncodingEvidence {
    CosetResult coset;      // the uniform coset H' + y the encodings live on
    int d = 1;
    u128 count = 0;         // encodings of T(d) with leaves in H' and nodes in H' + y
    Witness witness;        // one of them (kind TREE)
};

struct DenseSubspace {
    CosetResult coset;
    double codim_budget = 0;  // eps^{-m}
};

// Returns a (1 - eps)-dense coset, or counted T(d) encodings with leaves in H' and nodes in H' + y.
// uniform_eps is the uniformity parameter of the inner coset search (default eps^2).
std::variant<DenseSubspace, EncodingEvidence> find_dense_subspace(const GroupSubset& A, const LinearFactor& H,
                                                                   double eps, int d, int m = 2,
                                                                   double uniform_eps = -1);

// ------------------------------------------------------------- factor chains

struct FactorChain {
    double eps = 0.1;
    int D = 8;
    GrowthFunction f{"x"}, g{"2*x"};
    std::vector<LinearFactor> factors;  // L_0 .. L_T
    // gamma[i - 1][code] for L_i: 0, 1 or 2 (error); indexed by label code of L_i's vectors.
    std::vector<std::vector<std::uint8_t>> gamma;
    int T() const { return static_cast<int>(factors.size()) - 1; }
};

struct ChainCheck {
    bool syntactic = true;    // (1)
    bool growth = true;       // (2)
    bool densities = true;    // (3)
    bool error_spread = true; // (4)
    std::string detail;
    bool all() const { return syntactic && growth && densities && error_spread; }
};
ChainCheck factor_chain_check(const FactorChain& chain, const GroupSubset& A);

// Partition table of a linear factor (label code of each element).
std::vector<std::uint32_t> linear_table(const GroupSpec& g, const LinearFactor& L);

struct StableParams {
    double eps = 0.1;
    double mu = -1;              // error-coset allowance; defaults to eps
    GrowthFunction psi{"2*x"};
    GrowthFunction f{"x"}, g{"2*x"};
    int max_codim = 8;
};

struct StableResult {
    LinearFactor sub;                   // H' (vectors of H_0 first)
    int m = 0;                          // codimension of H' in H_0
    int ell = 0;                        // codimension of H_0 in G
    std::vector<std::uint32_t> omega;   // error cosets (label codes of sub)
    AtomicityVerdict verdict;           // at eps p^{-psi(m)}
    double threshold = 0;               // eps p^{-psi(m)}
    double omega_bound = 0;             // (mu + threshold) p^{m + ell}
    bool pass = false;                  // conclusion shape verified
    bool exhausted = false;             // stopped at max_codim without passing
    FactorChain chain;
    std::vector<double> error_fraction_by_m;  // cosets failing the threshold, as a fraction, per m
};

// Greedy refinement from the cosets of H_0; omega0 lists cosets of H_0 (label codes) left alone.
StableResult stable_linear_decomposition(const GroupSubset& A, const LinearFactor& H0,
                                         const std::vector<std::uint32_t>& omega0, const StableParams& params);

// ------------------------------------------------------------ brute force

struct QuadAtomization {
    bool found = false;
    QuadraticFactor factor;
    int complexity = 0;  // ell + q
    std::uint64_t candidates = 0;
};
// Minimal ell + q (ell <= n, q <= 2) eps-atomic pure quadratic factor; n <= 3.
QuadAtomization brute_quad_atomize(const GroupSubset& A, double eps, int max_complexity = 4);

// ----------------------------------------------------------- extraction

struct ExtractionResult {
    SearchResult search;            // FOP2 witness when FOUND
    std::vector<std::uint64_t> atom_sizes;  // domain sizes: x, y, then z_1..z_k
    std::string message;
};
// Good copy of H(k) (witness roles "a", "b" over red.labels, right side in H_B) -> k-FOP2 of A with
// x_i, y^f_j in the zero atom and z_s in the atom of label a_s.
ExtractionResult fop2_guided_extraction(const GroupSubset& A, const ReducedPair& red, const Witness& copy,
                                        const SearchBudget& budget = {});

}  // namespace qfa

#endif
