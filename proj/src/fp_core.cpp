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

#include "qfa/fp_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace qfa {

namespace {
int g_bits_override = 0;

int mod(int a, int p) {
    int r = a % p;
    return r < 0 ? r + p : r;
}
}  // namespace

int max_group_bits() {
    if (g_bits_override > 0) return g_bits_override;
    if (const char* env = std::getenv("QFA_MAX_GROUP_BITS")) {
        int v = std::atoi(env);
        if (v > 0 && v <= 40) return v;
    }
    return 24;
}

void set_max_group_bits(int bits) { g_bits_override = bits; }

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

int inv_mod(int a, int p) {
    a = mod(a, p);
    if (a == 0) throw RangeError("inv_mod: zero has no inverse");
    int r = 1;
    for (int e = p - 2, b = a; e > 0; e >>= 1, b = b * b % p)
        if (e & 1) r = r * b % p;
    return r;
}

// ---------------------------------------------------------------- FpVector

FpVector::FpVector(int p, int n) : p_(p), c_(static_cast<std::size_t>(n), 0) {}

FpVector::FpVector(int p, std::vector<int> coords) : p_(p), c_(std::move(coords)) {
    for (auto& v : c_) v = mod(v, p_);
}

void FpVector::set(int i, int v) { c_.at(static_cast<std::size_t>(i)) = mod(v, p_); }

bool FpVector::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](int v) { return v == 0; });
}

FpVector FpVector::operator+(const FpVector& o) const {
    if (o.size() != size()) throw ShapeError("vector length mismatch");
    FpVector r(p_, size());
    for (int i = 0; i < size(); ++i) r.c_[i] = (c_[i] + o.c_[i]) % p_;
    return r;
}

FpVector FpVector::operator-(const FpVector& o) const { return *this + (-o); }

FpVector FpVector::operator-() const {
    FpVector r(p_, size());
    for (int i = 0; i < size(); ++i) r.c_[i] = (p_ - c_[i]) % p_;
    return r;
}

FpVector FpVector::scaled(int s) const {
    s = mod(s, p_);
    FpVector r(p_, size());
    for (int i = 0; i < size(); ++i) r.c_[i] = c_[i] * s % p_;
    return r;
}

int FpVector::dot(const FpVector& o) const {
    if (o.size() != size()) throw ShapeError("vector length mismatch");
    long s = 0;
    for (int i = 0; i < size(); ++i) s += c_[i] * o.c_[i];
    return static_cast<int>(s % p_);
}

FpVector FpVector::basis(int p, int n, int i) {
    FpVector r(p, n);
    r.set(i, 1);
    return r;
}

std::string FpVector::digits() const {
    std::string s;
    for (int v : c_) s += (v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10));
    return s;
}

// ------------------------------------------------------------- FpSymMatrix

FpSymMatrix::FpSymMatrix(int p, int n) : p_(p), n_(n), a_(static_cast<std::size_t>(n * n), 0) {}

FpSymMatrix::FpSymMatrix(int p, std::vector<std::vector<int>> rows) : p_(p), n_(static_cast<int>(rows.size())) {
    a_.assign(static_cast<std::size_t>(n_ * n_), 0);
    for (int i = 0; i < n_; ++i) {
        if (static_cast<int>(rows[i].size()) != n_) throw ShapeError("matrix is not square");
        for (int j = 0; j < n_; ++j) a_[i * n_ + j] = mod(rows[i][j], p);
    }
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < i; ++j)
            if (a_[i * n_ + j] != a_[j * n_ + i]) throw ValidationError("matrix is not symmetric");
}

FpSymMatrix FpSymMatrix::identity(int p, int n) {
    FpSymMatrix m(p, n);
    for (int i = 0; i < n; ++i) m.a_[i * n + i] = 1;
    return m;
}

void FpSymMatrix::set_sym(int i, int j, int v) {
    a_[i * n_ + j] = mod(v, p_);
    a_[j * n_ + i] = mod(v, p_);
}

bool FpSymMatrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](int v) { return v == 0; });
}

FpSymMatrix FpSymMatrix::operator+(const FpSymMatrix& o) const {
    if (o.n_ != n_) throw ShapeError("matrix size mismatch");
    FpSymMatrix r(p_, n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = (a_[i] + o.a_[i]) % p_;
    return r;
}

FpSymMatrix FpSymMatrix::scaled(int s) const {
    s = mod(s, p_);
    FpSymMatrix r(p_, n_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s % p_;
    return r;
}

FpVector FpSymMatrix::apply(const FpVector& x) const {
    if (x.size() != n_) throw ShapeError("matrix/vector size mismatch");
    std::vector<int> r(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) {
        long s = 0;
        for (int j = 0; j < n_; ++j) s += a_[i * n_ + j] * x[j];
        r[i] = static_cast<int>(s % p_);
    }
    return FpVector(p_, r);
}

int quad_eval(const FpSymMatrix& M, const FpVector& x) { return bilin_eval(M, x, x); }

int bilin_eval(const FpSymMatrix& M, const FpVector& x, const FpVector& y) {
    if (x.size() != M.n() || y.size() != M.n()) throw ShapeError("matrix/vector size mismatch");
    return x.dot(M.apply(y));
}

std::vector<std::vector<int>> row_reduce(int p, std::vector<std::vector<int>> rows) {
    std::vector<std::vector<int>> out;
    if (rows.empty()) return out;
    std::size_t cols = rows[0].size();
    std::size_t r = 0;
    for (auto& row : rows)
        for (auto& v : row) v = mod(v, p);
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[r], rows[piv]);
        int inv = inv_mod(rows[r][c], p);
        for (auto& v : rows[r]) v = v * inv % p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            int f = rows[i][c];
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] = mod(rows[i][j] - f * rows[r][j], p);
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

int rank_of_rows(int p, std::vector<std::vector<int>> rows) {
    return static_cast<int>(row_reduce(p, std::move(rows)).size());
}

int matrix_rank(const FpSymMatrix& M) {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(M.n()), std::vector<int>(static_cast<std::size_t>(M.n())));
    for (int i = 0; i < M.n(); ++i)
        for (int j = 0; j < M.n(); ++j) rows[i][j] = M.at(i, j);
    return rank_of_rows(M.p(), std::move(rows));
}

// --------------------------------------------------------------- GroupSpec

GroupSpec::GroupSpec(int p, int n) : p_(p), n_(n) {
    if (p < 3 || !is_prime(p)) throw ValidationError("p must be an odd prime, got " + std::to_string(p));
    if (n < 1) throw ValidationError("n must be at least 1");
    long double bits = n * std::log2(static_cast<long double>(p));
    if (bits > max_group_bits() + 1e-9L)
        throw CapacityError("group " + std::to_string(p) + "^" + std::to_string(n) + " exceeds the enumeration cap of 2^" +
                            std::to_string(max_group_bits()));
    order_ = 1;
    for (int i = 0; i < n; ++i) order_ *= static_cast<std::uint64_t>(p);
    pow_.resize(static_cast<std::size_t>(n) + 1);
    pow_[0] = 1;
    for (int i = 1; i <= n; ++i) pow_[i] = pow_[i - 1] * static_cast<std::uint64_t>(p);
    chunk_digits_ = 1;
    while (chunk_digits_ < n && pow_[chunk_digits_ + 1] <= 256) ++chunk_digits_;
    chunk_size_ = pow_[chunk_digits_];
    chunks_ = (n + chunk_digits_ - 1) / chunk_digits_;
    std::vector<std::uint32_t> add_table(chunk_size_ * chunk_size_), neg_table(chunk_size_);
    for (std::uint64_t a = 0; a < chunk_size_; ++a) {
        std::uint64_t na = 0;
        for (int d = 0; d < chunk_digits_; ++d) {
            int da = static_cast<int>(a / pow_[d] % p);
            na += static_cast<std::uint64_t>((p - da) % p) * pow_[d];
        }
        neg_table[a] = static_cast<std::uint32_t>(na);
        for (std::uint64_t b = 0; b < chunk_size_; ++b) {
            std::uint64_t s = 0;
            for (int d = 0; d < chunk_digits_; ++d) {
                int da = static_cast<int>(a / pow_[d] % p), db = static_cast<int>(b / pow_[d] % p);
                s += static_cast<std::uint64_t>((da + db) % p) * pow_[d];
            }
            add_table[a * chunk_size_ + b] = static_cast<std::uint32_t>(s);
        }
    }
    add_table_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(add_table));
    neg_table_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(neg_table));
}

std::uint64_t GroupSpec::index_of(const FpVector& v) const {
    if (v.size() != n_) throw ShapeError("vector length " + std::to_string(v.size()) + " != n = " + std::to_string(n_));
    std::uint64_t idx = 0;
    for (int i = n_ - 1; i >= 0; --i) idx = idx * static_cast<std::uint64_t>(p_) + static_cast<std::uint64_t>(v[i]);
    return idx;
}

FpVector GroupSpec::vector_of(std::uint64_t index) const {
    if (index >= order_) throw RangeError("index " + std::to_string(index) + " out of range");
    FpVector v(p_, n_);
    for (int i = 0; i < n_; ++i) {
        v.set(i, static_cast<int>(index % static_cast<std::uint64_t>(p_)));
        index /= static_cast<std::uint64_t>(p_);
    }
    return v;
}

int GroupSpec::digit(std::uint64_t index, int i) const {
    return static_cast<int>(index / pow_[i] % static_cast<std::uint64_t>(p_));
}

std::uint64_t GroupSpec::add(std::uint64_t a, std::uint64_t b) const {
    const auto& at = *add_table_;
    if (chunks_ == 1) return at[a * chunk_size_ + b];
    std::uint64_t r = 0, mult = 1;
    for (int c = 0; c < chunks_; ++c) {
        std::uint64_t ca = a % chunk_size_, cb = b % chunk_size_;
        r += at[ca * chunk_size_ + cb] * mult;
        a /= chunk_size_;
        b /= chunk_size_;
        mult *= chunk_size_;
    }
    return r;
}

std::uint64_t GroupSpec::neg(std::uint64_t a) const {
    std::uint64_t r = 0, mult = 1;
    for (int c = 0; c < chunks_; ++c) {
        r += (*neg_table_)[a % chunk_size_] * mult;
        a /= chunk_size_;
        mult *= chunk_size_;
    }
    return r;
}

std::uint64_t GroupSpec::scale(std::uint64_t a, int s) const {
    s = mod(s, p_);
    std::uint64_t r = 0;
    for (int i = 0; i < n_; ++i) {
        std::uint64_t d = a % static_cast<std::uint64_t>(p_);
        a /= static_cast<std::uint64_t>(p_);
        r += (d * static_cast<std::uint64_t>(s) % static_cast<std::uint64_t>(p_)) * pow_[i];
    }
    return r;
}

int GroupSpec::dot(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = 0;
    for (int i = 0; i < n_; ++i) {
        s += (a % static_cast<std::uint64_t>(p_)) * (b % static_cast<std::uint64_t>(p_));
        a /= static_cast<std::uint64_t>(p_);
        b /= static_cast<std::uint64_t>(p_);
    }
    return static_cast<int>(s % static_cast<std::uint64_t>(p_));
}

// ------------------------------------------------------------------ Bitset

std::size_t Bitset::count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

bool Bitset::any() const {
    return std::any_of(w_.begin(), w_.end(), [](std::uint64_t w) { return w != 0; });
}

void Bitset::flip_all() {
    for (auto& w : w_) w = ~w;
    if (n_ % 64 != 0 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
}

Bitset& Bitset::operator&=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
}

Bitset& Bitset::operator|=(const Bitset& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
}

std::size_t Bitset::and_count(const Bitset& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += static_cast<std::size_t>(std::popcount(w_[i] & o.w_[i]));
    return c;
}

std::size_t Bitset::next(std::size_t from) const {
    if (from >= n_) return n_;
    std::size_t wi = from >> 6;
    std::uint64_t w = w_[wi] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (w != 0) {
            std::size_t r = (wi << 6) + static_cast<std::size_t>(std::countr_zero(w));
            return r < n_ ? r : n_;
        }
        if (++wi >= w_.size()) return n_;
        w = w_[wi];
    }
}

// ------------------------------------------------------------- GroupSubset

GroupSubset::GroupSubset(const GroupSpec& g, const std::function<bool(std::uint64_t)>& member)
    : g_(g), bits_(g.order()) {
    for (std::uint64_t i = 0; i < g.order(); ++i)
        if (member(i)) bits_.set(i);
}

GroupSubset GroupSubset::complement() const {
    GroupSubset r = *this;
    r.bits_.flip_all();
    return r;
}

GroupSubset GroupSubset::translate_back(std::uint64_t t) const {
    GroupSubset r(g_);
    for (std::uint64_t x = 0; x < g_.order(); ++x)
        if (bits_.test(g_.add(x, t))) r.bits_.set(x);
    return r;
}

GroupSubset GroupSubset::intersect(const GroupSubset& o) const {
    if (!(g_ == o.g_)) throw ShapeError("subsets of different groups");
    GroupSubset r = *this;
    r.bits_ &= o.bits_;
    return r;
}

GroupSubset GroupSubset::unite(const GroupSubset& o) const {
    if (!(g_ == o.g_)) throw ShapeError("subsets of different groups");
    GroupSubset r = *this;
    r.bits_ |= o.bits_;
    return r;
}

std::vector<std::uint64_t> GroupSubset::members() const {
    std::vector<std::uint64_t> r;
    for (std::size_t i = bits_.next(0); i < bits_.size(); i = bits_.next(i + 1)) r.push_back(i);
    return r;
}

// ----------------------------------------------------------- Fourier/Gauss

Complex root_of_unity(int p, int k) {
    k = mod(k, p);
    double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p);
    return {std::cos(a), std::sin(a)};
}

Complex gauss_sum(const FpSymMatrix& M, const FpVector& b) {
    if (b.size() != M.n() || b.p() != M.p()) throw ShapeError("gauss_sum: shape mismatch");
    GroupSpec g(M.p(), M.n());
    auto qt = quad_table(g, M);
    auto bt = dot_table(g, b);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(M.p()), 0);
    for (std::uint64_t x = 0; x < g.order(); ++x) ++counts[(qt[x] + bt[x]) % M.p()];
    Complex s = 0;
    for (int r = 0; r < M.p(); ++r) s += static_cast<double>(counts[r]) * root_of_unity(M.p(), r);
    return s / static_cast<double>(g.order());
}

namespace {
std::vector<Complex> axis_transform(const GroupSpec& g, std::vector<Complex> a, int sign) {
    const int p = g.p();
    std::vector<Complex> w(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) w[k] = root_of_unity(p, sign * k);
    std::vector<Complex> in(static_cast<std::size_t>(p)), out(static_cast<std::size_t>(p));
    std::uint64_t stride = 1;
    for (int axis = 0; axis < g.n(); ++axis) {
        std::uint64_t block = stride * static_cast<std::uint64_t>(p);
        for (std::uint64_t base = 0; base < g.order(); base += block) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                for (int k = 0; k < p; ++k) in[k] = a[base + off + static_cast<std::uint64_t>(k) * stride];
                for (int t = 0; t < p; ++t) {
                    // Neumaier-compensated sum of p terms.
                    double sr = 0, si = 0, cr = 0, ci = 0;
                    for (int x = 0; x < p; ++x) {
                        Complex term = in[x] * w[(x * t) % p];
                        double tr = sr + term.real();
                        cr += std::abs(sr) >= std::abs(term.real()) ? (sr - tr) + term.real() : (term.real() - tr) + sr;
                        sr = tr;
                        double ti = si + term.imag();
                        ci += std::abs(si) >= std::abs(term.imag()) ? (si - ti) + term.imag() : (term.imag() - ti) + si;
                        si = ti;
                    }
                    out[t] = Complex(sr + cr, si + ci);
                }
                for (int t = 0; t < p; ++t) a[base + off + static_cast<std::uint64_t>(t) * stride] = out[t];
            }
        }
        stride = block;
    }
    return a;
}
}  // namespace

std::vector<Complex> dft(const GroupSpec& g, const std::vector<Complex>& f) {
    if (f.size() != g.order()) throw ShapeError("dft: table size != |G|");
    auto r = axis_transform(g, f, -1);
    const double inv = 1.0 / static_cast<double>(g.order());
    for (auto& v : r) v *= inv;
    return r;
}

std::vector<Complex> inverse_dft(const GroupSpec& g, const std::vector<Complex>& fhat) {
    if (fhat.size() != g.order()) throw ShapeError("inverse_dft: table size != |G|");
    return axis_transform(g, fhat, 1);
}

std::vector<std::uint8_t> quad_table(const GroupSpec& g, const FpSymMatrix& M) {
    if (M.n() != g.n() || M.p() != g.p()) throw ShapeError("quad_table: shape mismatch");
    auto at = apply_table(g, M);
    std::vector<std::uint8_t> t(g.order());
    for (std::uint64_t x = 0; x < g.order(); ++x) t[x] = static_cast<std::uint8_t>(g.dot(x, at[x]));
    return t;
}

std::vector<std::uint8_t> dot_table(const GroupSpec& g, const FpVector& v) {
    if (v.size() != g.n()) throw ShapeError("dot_table: shape mismatch");
    std::uint64_t vi = g.index_of(v);
    std::vector<std::uint8_t> t(g.order());
    for (std::uint64_t x = 0; x < g.order(); ++x) t[x] = static_cast<std::uint8_t>(g.dot(x, vi));
    return t;
}

std::vector<std::uint64_t> apply_table(const GroupSpec& g, const FpSymMatrix& M) {
    if (M.n() != g.n() || M.p() != g.p()) throw ShapeError("apply_table: shape mismatch");
    // M x is linear: build from the images of basis vectors.
    std::vector<std::uint64_t> col(static_cast<std::size_t>(g.n()));
    for (int j = 0; j < g.n(); ++j) {
        FpVector e = FpVector::basis(g.p(), g.n(), j);
        col[j] = g.index_of(M.apply(e));
    }
    std::vector<std::uint64_t> t(g.order(), 0);
    std::uint64_t stride = 1;
    for (int j = 0; j < g.n(); ++j) {
        // Indices in [stride, p*stride) have top digit j; the rest of x is already filled.
        for (std::uint64_t x = stride; x < stride * static_cast<std::uint64_t>(g.p()); ++x) {
            int d = static_cast<int>(x / stride);
            t[x] = g.add(t[x - static_cast<std::uint64_t>(d) * stride], g.scale(col[j], d));
        }
        stride *= static_cast<std::uint64_t>(g.p());
    }
    return t;
}

}  // namespace qfa
