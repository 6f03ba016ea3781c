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

#ifndef QFA_FP_CORE_HPP
#define QFA_FP_CORE_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfa {

using u128 = unsigned __int128;
using Complex = std::complex<double>;

class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};
class RangeError : public Error {
   public:
    using Error::Error;
};
class ShapeError : public Error {
   public:
    using Error::Error;
};
class CapacityError : public Error {
   public:
    using Error::Error;
};
class ValidationError : public Error {
   public:
    using Error::Error;
};
class ParseError : public Error {
   public:
    using Error::Error;
};

// Enumeration cap in bits: |G| <= 2^bits. Default 24, overridable by QFA_MAX_GROUP_BITS.
int max_group_bits();
void set_max_group_bits(int bits);  // 0 restores the environment/default value

bool is_prime(int p);
std::string u128_to_string(u128 v);

class FpVector {
   public:
    FpVector() = default;
    FpVector(int p, int n);
    FpVector(int p, std::vector<int> coords);

    int p() const { return p_; }
    int size() const { return static_cast<int>(c_.size()); }
    int operator[](int i) const { return c_[i]; }
    void set(int i, int v);
    const std::vector<int>& coords() const { return c_; }
    bool is_zero() const;

    FpVector operator+(const FpVector& o) const;
    FpVector operator-(const FpVector& o) const;
    FpVector operator-() const;
    FpVector scaled(int s) const;
    int dot(const FpVector& o) const;
    bool operator==(const FpVector& o) const = default;

    static FpVector basis(int p, int n, int i);  // e_{i+1}, 0-based i
    std::string digits() const;                  // coordinate 1 first

   private:
    int p_ = 3;
    std::vector<int> c_;
};

class FpSymMatrix {
   public:
    FpSymMatrix() = default;
    FpSymMatrix(int p, int n);                       // zero matrix
    FpSymMatrix(int p, std::vector<std::vector<int>> rows);  // validated symmetric

    static FpSymMatrix identity(int p, int n);

    int p() const { return p_; }
    int n() const { return n_; }
    int at(int i, int j) const { return a_[i * n_ + j]; }
    void set_sym(int i, int j, int v);  // sets (i,j) and (j,i)
    bool is_zero() const;

    FpSymMatrix operator+(const FpSymMatrix& o) const;
    FpSymMatrix scaled(int s) const;
    bool operator==(const FpSymMatrix& o) const = default;

    FpVector apply(const FpVector& x) const;  // M x

   private:
    int p_ = 3;
    int n_ = 0;
    std::vector<int> a_;
};

int quad_eval(const FpSymMatrix& M, const FpVector& x);
int bilin_eval(const FpSymMatrix& M, const FpVector& x, const FpVector& y);
int matrix_rank(const FpSymMatrix& M);
int rank_of_rows(int p, std::vector<std::vector<int>> rows);  // rank of a list of row vectors
// Reduced row echelon basis of the span of rows (nonzero rows only).
std::vector<std::vector<int>> row_reduce(int p, std::vector<std::vector<int>> rows);
int inv_mod(int a, int p);

// The ambient group F_p^n with fast index arithmetic.
class GroupSpec {
   public:
    GroupSpec() = default;
    GroupSpec(int p, int n);  // validates p odd prime, n >= 1, cap

    int p() const { return p_; }
    int n() const { return n_; }
    std::uint64_t order() const { return order_; }

    std::uint64_t index_of(const FpVector& v) const;
    FpVector vector_of(std::uint64_t index) const;
    int digit(std::uint64_t index, int i) const;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t neg(std::uint64_t a) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return add(a, neg(b)); }
    std::uint64_t scale(std::uint64_t a, int s) const;
    int dot(std::uint64_t a, std::uint64_t b) const;

    bool operator==(const GroupSpec& o) const { return p_ == o.p_ && n_ == o.n_; }

   private:
    int p_ = 0;
    int n_ = 0;
    std::uint64_t order_ = 0;
    int chunk_digits_ = 1;
    std::uint64_t chunk_size_ = 1;
    int chunks_ = 0;
    // Shared so that copies of subsets stay cheap.
    std::shared_ptr<const std::vector<std::uint32_t>> add_table_;
    std::shared_ptr<const std::vector<std::uint32_t>> neg_table_;
    std::vector<std::uint64_t> pow_;
};

class Bitset {
   public:
    Bitset() = default;
    explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}
    std::size_t size() const { return n_; }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool v = true) {
        if (v)
            w_[i >> 6] |= (std::uint64_t{1} << (i & 63));
        else
            w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    std::size_t count() const;
    bool any() const;
    void flip_all();
    Bitset& operator&=(const Bitset& o);
    Bitset& operator|=(const Bitset& o);
    std::size_t and_count(const Bitset& o) const;
    // Smallest set index >= from, or size() if none.
    std::size_t next(std::size_t from) const;
    bool operator==(const Bitset& o) const = default;
    const std::vector<std::uint64_t>& words() const { return w_; }

   private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class GroupSubset {
   public:
    GroupSubset() = default;
    explicit GroupSubset(const GroupSpec& g) : g_(g), bits_(g.order()) {}
    GroupSubset(const GroupSpec& g, const std::function<bool(std::uint64_t)>& member);

    const GroupSpec& spec() const { return g_; }
    bool contains(std::uint64_t i) const { return bits_.test(i); }
    bool contains(const FpVector& v) const { return bits_.test(g_.index_of(v)); }
    void insert(std::uint64_t i) { bits_.set(i); }
    void erase(std::uint64_t i) { bits_.set(i, false); }
    std::uint64_t size() const { return bits_.count(); }
    double density() const { return static_cast<double>(size()) / static_cast<double>(g_.order()); }

    GroupSubset complement() const;
    GroupSubset translate_back(std::uint64_t t) const;  // {x : x + t in A} = A - t
    GroupSubset intersect(const GroupSubset& o) const;
    GroupSubset unite(const GroupSubset& o) const;
    std::vector<std::uint64_t> members() const;
    const Bitset& bits() const { return bits_; }
    bool operator==(const GroupSubset& o) const { return g_ == o.g_ && bits_ == o.bits_; }

   private:
    GroupSpec g_;
    Bitset bits_;
};

// Gauss sum E_x w^{x^T M x + b.x}; computed from exact residue counts.
Complex gauss_sum(const FpSymMatrix& M, const FpVector& b);

// f^(t) = E_x f(x) w^{-x.t}, n axis passes of length p.
std::vector<Complex> dft(const GroupSpec& g, const std::vector<Complex>& f);
std::vector<Complex> inverse_dft(const GroupSpec& g, const std::vector<Complex>& fhat);

// Table of x^T M x for every group element (by index).
std::vector<std::uint8_t> quad_table(const GroupSpec& g, const FpSymMatrix& M);
std::vector<std::uint8_t> dot_table(const GroupSpec& g, const FpVector& v);
// Index of M x for every x.
std::vector<std::uint64_t> apply_table(const GroupSpec& g, const FpSymMatrix& M);

Complex root_of_unity(int p, int k);  // exp(2 pi i k / p)

}  // namespace qfa

#endif
