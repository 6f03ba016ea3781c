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

#ifndef QFA_SUITES_HPP
#define QFA_SUITES_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfa/report.hpp"

namespace qfa {

inline constexpr std::uint64_t kDefaultSeed = 0xF0F2;

// Suites: gs, quadric, qgs, uniformity, closure, regularize, appendix. Check ids carry the number of
// the acceptance criterion they belong to ("4d", "6a", ...).
struct SuiteParams {
    int p = 3;
    int n = 0;        // 0: the suite's own sizes
    double eps = 0;   // 0: the suite's default
    std::uint64_t seed = kDefaultSeed;
    std::map<std::string, std::string> config() const;
    static SuiteParams from_config(const std::map<std::string, std::string>& cfg);
};

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& suite_names();

// Throws UsageError for an unknown suite name or unsupported parameters; individual check errors
// become ERROR entries.
SuiteResult run_suite(const std::string& name, const SuiteParams& params = {});

}  // namespace qfa

#endif
