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


#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qfa/constructions.hpp"
#include "qfa/io.hpp"
#include "qfa/report.hpp"
#include "qfa/suites.hpp"

using namespace qfa;

namespace {

std::string temp_file(const std::string& name, const std::string& body) {
    auto path = std::filesystem::temp_directory_path() / ("qfa_test_" + name);
    std::ofstream(path) << body;
    return path.string();
}

std::string parse_error(const std::string& spec) {
    try {
        parse_set_spec(spec);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("set specs") {
    CHECK(parse_set_spec("gs:p=3,n=4").size() == 40);
    CHECK(parse_set_spec("gs:p=3,n=4") == gs(4, 3));
    CHECK(parse_set_spec("quadric:p=3,n=3,c=0").size() == 9);
    CHECK(parse_set_spec("quadric:n=3") == standard_quadric(3, 3, 0));
    CHECK(parse_set_spec("sparse:p=3,n=8").size() == 10);
    CHECK(parse_set_spec("qgs:p=3,n=4") == qgs(4, 3).set);
    auto U = parse_set_spec("union-cosets:p=3,n=3,h=100,reps=000;200");
    CHECK(U.size() == 18);
    CHECK(U.contains(FpVector(3, {0, 2, 1})));
    CHECK_FALSE(U.contains(FpVector(3, {1, 2, 1})));
}

TEST_CASE("set files") {
    auto path = temp_file("set.txt", "# two members\np=3\n012\n  210  # trailing comment\n");
    auto A = parse_set_spec("file:" + path);
    CHECK(A.size() == 2);
    CHECK(A.spec().n() == 3);
    CHECK(A.contains(FpVector(3, {0, 1, 2})));
    CHECK(A.contains(FpVector(3, {2, 1, 0})));
    auto bad = temp_file("bad.txt", "01\n013\n");
    CHECK_THROWS_AS(parse_set_spec("file:" + bad), ParseError);
    CHECK_THROWS_AS(parse_set_spec("file:/nonexistent/qfa"), ParseError);
}

TEST_CASE("set spec errors carry positions") {
    CHECK(parse_error("nosuch:n=3").find("position 0") != std::string::npos);
    CHECK(parse_error("gs:p=4,n=3").find("position 5") != std::string::npos);
    CHECK(parse_error("gs:p=3,n=x").find("position 9") != std::string::npos);
    CHECK(parse_error("gs:p=3,q=3").find("unknown key") != std::string::npos);
    CHECK(parse_error("gs:p=3,n=30").find("position") != std::string::npos);  // cap exceeded
    CHECK(parse_error("gs:p=3") .find("missing key 'n'") != std::string::npos);
    CHECK(parse_error("union-cosets:p=3,n=2,reps=0a").find("bad digit") != std::string::npos);
}

TEST_CASE("vectors") {
    CHECK(parse_vector("1200", 3).coords() == std::vector<int>{1, 2, 0, 0});
    CHECK(format_vector(FpVector(3, {0, 2, 1})) == "021");
    CHECK_THROWS_AS(parse_vector("13", 3), ParseError);
    CHECK_THROWS_AS(parse_vector("12", 3, 3), ParseError);
}

TEST_CASE("factor files round-trip") {
    auto B = trace_factor(4, 3, 2, 2);
    auto text = format_factor(B);
    auto C = parse_factor(text);
    CHECK(C.linear() == B.linear());
    CHECK(C.quadratic() == B.quadratic());
    auto G = parse_factor("3 2 0 1\n# matrix\n12\n21\n11\n");
    CHECK(G.general());
    CHECK(G.shifts()[0].digits() == "11");
    CHECK(G.quadratic()[0].at(0, 1) == 2);
    auto path = temp_file("factor.txt", text);
    CHECK(read_factor_file(path).quadratic() == B.quadratic());
    CHECK_THROWS_AS(parse_factor("3 2 1 0\n"), ParseError);
    CHECK_THROWS_AS(parse_factor("3 2 0 1\n12\n01\n"), ParseError);  // not symmetric
    CHECK_THROWS_AS(parse_factor("4 2 0 0\n"), ParseError);
}

TEST_CASE("config files") {
    auto cfg = parse_config("# comment\np = 3\nseed=7\n\neps=0.2 # inline\n");
    CHECK(cfg.at("p") == "3");
    CHECK(cfg.at("seed") == "7");
    CHECK(cfg.at("eps") == "0.2");
    CHECK_THROWS_AS(parse_config("novalue\n"), ParseError);
    auto s = SuiteParams::from_config(cfg);
    CHECK(s.seed == 7);
    CHECK(s.eps == doctest::Approx(0.2));
    CHECK(SuiteParams::from_config(s.config()).seed == 7);
}

TEST_CASE("reports") {
    SuiteResult empty;
    empty.suite = "none";
    CHECK(empty.passed());
    CHECK(emit_report(empty, ReportFormat::JSON).find("\"verdict\": \"PASS\"") != std::string::npos);

    SuiteResult r;
    r.suite = "demo";
    r.config = {{"p", "3"}};
    r.checks.push_back({"1a", "first", CheckStatus::PASS, 1.5, 2, "w", 0.25});
    r.checks.push_back({"1b", "second", CheckStatus::FAIL, 3, 2, "bad", 1});
    CHECK_FALSE(r.passed());
    auto text = emit_report(r, ReportFormat::JSON);
    CHECK(text.find("\"verdict\": \"FAIL\"") != std::string::npos);
    auto back = parse_report_json(text);
    REQUIRE(back.checks.size() == 2);
    CHECK(back.suite == "demo");
    CHECK(back.checks[1].status == CheckStatus::FAIL);
    CHECK(back.checks[0].measured == 1.5);
    CHECK(back.checks[0].witness == "w");
    CHECK(back.config.at("p") == "3");
    CHECK(emit_report(back, ReportFormat::JSON) == text);
    auto table = emit_report(r, ReportFormat::TEXT);
    CHECK(table.find("verdict FAIL") != std::string::npos);
    CHECK(table.find("1b    FAIL") != std::string::npos);
    CHECK_THROWS_AS(check_status_from_string("MAYBE"), ParseError);
}

TEST_CASE("suite dispatch") {
    CHECK_THROWS_AS(run_suite("nosuch", SuiteParams{}), UsageError);
    SuiteParams bad;
    bad.p = 5;
    CHECK_THROWS_AS(run_suite("gs", bad), UsageError);
    CHECK(suite_names().size() == 7);
}

TEST_CASE("quadric suite passes and replays identically") {
    SuiteParams prm;
    prm.n = 3;
    auto a = run_suite("quadric", prm);
    REQUIRE(a.checks.size() == 4);
    CHECK(a.passed());
    auto b = run_suite("quadric", SuiteParams::from_config(a.config));
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].id == b.checks[i].id);
        CHECK(a.checks[i].status == b.checks[i].status);
        CHECK(a.checks[i].measured == b.checks[i].measured);
    }
}

TEST_CASE("gs suite passes at n = 3") {
    SuiteParams prm;
    prm.n = 3;
    auto r = run_suite("gs", prm);
    CHECK(r.passed());
    bool has_1d = false;
    for (const auto& c : r.checks) has_1d |= c.id == "1d";
    CHECK(has_1d);
}
