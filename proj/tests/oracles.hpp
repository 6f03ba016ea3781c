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


// Brute-force reference computations shared by the unit tests. They work on plain coordinate
// vectors and never call the library routine they are compared against.

#ifndef QFA_TESTS_ORACLES_HPP
#define QFA_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<int>;
using Mat = std::vector<std::vector<int>>;

inline int mod(long long a, int p) { return static_cast<int>(((a % p) + p) % p); }

// Little-endian digits: coordinate 1 is the least significant.
inline Vec vec(std::uint64_t idx, int p, int n) {
    Vec v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i, idx /= static_cast<std::uint64_t>(p)) v[i] = static_cast<int>(idx % static_cast<std::uint64_t>(p));
    return v;
}
inline std::uint64_t index(const Vec& v, int p) {
    std::uint64_t r = 0;
    for (std::size_t i = v.size(); i-- > 0;) r = r * static_cast<std::uint64_t>(p) + static_cast<std::uint64_t>(v[i]);
    return r;
}
inline std::uint64_t order(int p, int n) {
    std::uint64_t r = 1;
    for (int i = 0; i < n; ++i) r *= static_cast<std::uint64_t>(p);
    return r;
}
inline Vec add(const Vec& a, const Vec& b, int p) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = mod(a[i] + b[i], p);
    return r;
}
inline int dot(const Vec& a, const Vec& b, int p) {
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long long>(a[i]) * b[i];
    return mod(s, p);
}
inline int quad(const Mat& M, const Vec& x, int p) {
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) s += static_cast<long long>(x[i]) * M[i][j] * x[j];
    return mod(s, p);
}
inline int bilin(const Mat& M, const Vec& x, const Vec& y, int p) {
    long long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) s += static_cast<long long>(x[i]) * M[i][j] * y[j];
    return mod(s, p);
}

// Rank of an n x n matrix from the size of its kernel: |ker M| = p^{n - rank}.
inline int rank_by_kernel(const Mat& M, int p) {
    const int n = static_cast<int>(M.size());
    std::uint64_t ker = 0;
    for (std::uint64_t x = 0; x < order(p, n); ++x) {
        Vec v = vec(x, p, n);
        bool zero = true;
        for (int i = 0; i < n && zero; ++i) {
            long long s = 0;
            for (int j = 0; j < n; ++j) s += static_cast<long long>(M[i][j]) * v[j];
            zero = mod(s, p) == 0;
        }
        ker += zero;
    }
    int k = 0;
    while (ker > 1) ker /= static_cast<std::uint64_t>(p), ++k;
    return n - k;
}

// Dimension of the span of a list of vectors, by counting the span.
inline int span_dim(const std::vector<Vec>& vs, int p, int n) {
    std::vector<char> seen(order(p, n), 0);
    std::vector<std::uint64_t> frontier{0};
    seen[0] = 1;
    for (const auto& v : vs) {
        std::vector<std::uint64_t> next = frontier;
        for (auto x : frontier) {
            Vec cur = vec(x, p, n);
            for (int c = 1; c < p; ++c) {
                cur = add(cur, v, p);
                const auto i = index(cur, p);
                if (!seen[i]) seen[i] = 1, next.push_back(i);
            }
        }
        frontier = std::move(next);
    }
    int d = 0;
    for (std::size_t s = frontier.size(); s > 1; s /= static_cast<std::size_t>(p)) ++d;
    return d;
}

inline std::complex<double> omega(int p, long long k) {
    const double a = 2.0 * M_PI * static_cast<double>(mod(k, p)) / p;
    return {std::cos(a), std::sin(a)};
}

}  // namespace oracle

#endif
