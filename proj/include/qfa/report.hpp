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

#ifndef QFA_REPORT_HPP
#define QFA_REPORT_HPP

#include <map>
#include <string>
#include <vector>

namespace qfa {

enum class CheckStatus { PASS, FAIL, ERROR };
std::string to_string(CheckStatus s);
CheckStatus check_status_from_string(const std::string& s);

struct CheckResult {
    std::string id;      // e.g. "1d"
    std::string anchor;  // what the check reproduces
    CheckStatus status = CheckStatus::ERROR;
    double measured = 0;
    double bound = 0;
    std::string witness;  // witness or offending values, free text
    double runtime_ms = 0;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    std::map<std::string, std::string> config;
    bool passed() const;  // every check PASS (vacuously true when empty)
};

enum class ReportFormat { JSON, TEXT };
std::string emit_report(const SuiteResult& r, ReportFormat fmt);
SuiteResult parse_report_json(const std::string& text);

}  // namespace qfa

#endif
