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

#include "qfa/report.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include "qfa/fp_core.hpp"

namespace qfa {

using nlohmann::json;

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::PASS: return "PASS";
        case CheckStatus::FAIL: return "FAIL";
        case CheckStatus::ERROR: return "ERROR";
    }
    return "ERROR";
}

CheckStatus check_status_from_string(const std::string& s) {
    if (s == "PASS") return CheckStatus::PASS;
    if (s == "FAIL") return CheckStatus::FAIL;
    if (s == "ERROR") return CheckStatus::ERROR;
    throw ParseError("unknown check status '" + s + "'");
}

bool SuiteResult::passed() const {
    for (const auto& c : checks)
        if (c.status != CheckStatus::PASS) return false;
    return true;
}

std::string emit_report(const SuiteResult& r, ReportFormat fmt) {
    if (fmt == ReportFormat::JSON) {
        json j;
        j["suite"] = r.suite;
        j["checks"] = json::array();
        for (const auto& c : r.checks)
            j["checks"].push_back({{"id", c.id},
                                   {"anchor", c.anchor},
                                   {"status", to_string(c.status)},
                                   {"measured", c.measured},
                                   {"bound", c.bound},
                                   {"witness", c.witness},
                                   {"runtime_ms", c.runtime_ms}});
        j["verdict"] = r.passed() ? "PASS" : "FAIL";
        j["config"] = r.config;
        return j.dump(2) + "\n";
    }
    std::string out = fmt::format("suite {}  verdict {}\n", r.suite, r.passed() ? "PASS" : "FAIL");
    out += fmt::format("{:<5} {:<6} {:>14} {:>14} {:>10}  {}\n", "id", "status", "measured", "bound", "ms", "anchor");
    for (const auto& c : r.checks) {
        out += fmt::format("{:<5} {:<6} {:>14.6g} {:>14.6g} {:>10.1f}  {}\n", c.id, to_string(c.status), c.measured,
                           c.bound, c.runtime_ms, c.anchor);
        if (c.status != CheckStatus::PASS && !c.witness.empty()) out += fmt::format("      {}\n", c.witness);
    }
    return out;
}

SuiteResult parse_report_json(const std::string& text) {
    SuiteResult r;
    try {
        const json j = json::parse(text);
        r.suite = j.at("suite").get<std::string>();
        for (const auto& c : j.at("checks")) {
            CheckResult k;
            k.id = c.at("id").get<std::string>();
            k.anchor = c.at("anchor").get<std::string>();
            k.status = check_status_from_string(c.at("status").get<std::string>());
            k.measured = c.at("measured").get<double>();
            k.bound = c.at("bound").get<double>();
            k.witness = c.at("witness").get<std::string>();
            k.runtime_ms = c.at("runtime_ms").get<double>();
            r.checks.push_back(std::move(k));
        }
        r.config = j.at("config").get<std::map<std::string, std::string>>();
        if (j.at("verdict").get<std::string>() != (r.passed() ? "PASS" : "FAIL"))
            throw ParseError("report verdict does not match its checks");
    } catch (const json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what());
    }
    return r;
}

}  // namespace qfa
