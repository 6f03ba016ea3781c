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

// qfa: command-line front end (verify, detect, measure, factor, regularize).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>

#include "qfa/detectors.hpp"
#include "qfa/factors.hpp"
#include "qfa/io.hpp"
#include "qfa/regularize.hpp"
#include "qfa/report.hpp"
#include "qfa/suites.hpp"
#include "qfa/uniformity.hpp"

using json = nlohmann::ordered_json;
using namespace qfa;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

json witness_json(const GroupSpec& g, const Witness& w) {
    json roles = json::object();
    for (std::size_t r = 0; r < w.roles.size(); ++r) {
        json vs = json::array();
        for (auto x : w.roles[r]) vs.push_back(g.vector_of(x).digits());
        roles[w.role_names[r]] = vs;
    }
    return {{"kind", to_string(w.kind)}, {"k", w.k}, {"roles", roles}};
}

std::vector<int> int_list(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string("triad: ") + what + " must be an array");
    return j.get<std::vector<int>>();
}

// {"atoms": [{"a": [...], "b": [...]}, ...], "pairs": [[...], ...]}
TriadDescriptor parse_triad(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("triad: ") + e.what());
    }
    TriadDescriptor d;
    try {
        for (const auto& a : j.at("atoms"))
            d.atoms.push_back(AtomLabel{int_list(a.at("a"), "a"), int_list(a.at("b"), "b")});
        for (const auto& p : j.at("pairs")) d.pairs.push_back(int_list(p, "pair"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("triad: ") + e.what());
    }
    const std::size_t k = d.atoms.size();
    if (k != 2 && k != 3) throw ParseError("triad: need 2 or 3 atoms");
    if (d.pairs.size() != (k == 2 ? 1 : 3)) throw ParseError("triad: need 1 pair value (binary) or 3 (ternary)");
    return d;
}

json chain_json(const GroupSpec& g, const FactorChain& c) {
    json factors = json::array();
    for (const auto& L : c.factors) {
        json vs = json::array();
        for (const auto& v : L.vectors) vs.push_back(v.digits());
        factors.push_back(vs);
    }
    return {{"p", g.p()},          {"n", g.n()},           {"eps", c.eps},         {"D", c.D},
            {"f", c.f.formula()}, {"g", c.g.formula()}, {"factors", factors}, {"gamma", c.gamma}};
}

int cmd_verify(const std::string& suite, const std::string& config, const std::map<std::string, std::string>& flags,
               const std::string& json_path, const std::string& format) {
    auto cfg = config.empty() ? std::map<std::string, std::string>{} : read_config(config);
    for (const auto& [k, v] : flags) cfg[k] = v;
    const std::string name = cfg.count("suite") ? cfg["suite"] : suite;
    if (name.empty()) throw UsageError("--suite is required");
    cfg.erase("suite");
    for (const auto& [k, v] : cfg)
        if (k != "p" && k != "n" && k != "eps" && k != "seed") throw UsageError("unknown config key '" + k + "'");
    auto res = run_suite(name, SuiteParams::from_config(cfg));
    std::cout << emit_report(res, format == "json" ? ReportFormat::JSON : ReportFormat::TEXT);
    if (!json_path.empty()) write_file(json_path, emit_report(res, ReportFormat::JSON));
    return res.passed() ? 0 : kExitFail;
}

int cmd_detect(const std::string& kind, const std::string& set, int k, bool with_witness, bool exhaustive) {
    const GroupSubset A = parse_set_spec(set);
    SearchBudget budget;
    if (exhaustive) budget.node_limit = std::numeric_limits<std::uint64_t>::max();
    if (k < 1) throw UsageError("--k must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    json out = {{"detector", kind}, {"set", set}, {"k", k}};
    SearchResult r;
    if (kind == "cap2") {
        auto c = cap2_check(A, budget);
        r.nodes = c.nodes;
        out["holds"] = c.holds;
        if (!c.cube.empty()) {
            json cube = json::array();
            for (auto x : c.cube) cube.push_back(A.spec().vector_of(x).digits());
            out["counterexample"] = cube;
        }
        r.status = c.status;
    } else if (kind == "tree") {
        Bitset all(A.spec().order());
        all.flip_all();
        r = find_tree_encoding(A.spec(), A.bits(), A.complement().bits(), k, all, all, false, budget);
    } else {
        static const std::map<std::string, SearchResult (*)(const GroupSubset&, int, const SearchBudget&)> fns = {
            {"op", find_op}, {"hop2", find_hop2}, {"fop2", find_fop2}, {"vc", find_vc}, {"vc2", find_vc2}};
        auto it = fns.find(kind);
        if (it == fns.end()) throw UsageError("unknown detector '" + kind + "'");
        r = it->second(A, k, budget);
    }
    out["status"] = to_string(r.status);
    out["nodes"] = r.nodes;
    out["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (r.status == SearchStatus::FOUND && kind != "cap2") {
        out["revalidated"] = revalidate(r.witness, A);
        if (with_witness) out["witness"] = witness_json(A.spec(), r.witness);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_measure(const std::string& kind, const std::string& set, const std::string& factor_path, const std::string& triad,
                double bound) {
    const GroupSubset A = parse_set_spec(set);
    const GroupSpec& g = A.spec();
    const auto t0 = std::chrono::steady_clock::now();
    MeasureReport m;
    m.name = kind;
    auto need_factor = [&] {
        if (factor_path.empty()) throw UsageError(kind + " needs --factor");
        auto B = read_factor_file(factor_path);
        if (B.p() != g.p() || B.n() != g.n()) throw UsageError("factor and set live in different groups");
        return B;
    };
    auto need_triad = [&] {
        if (triad.empty()) throw UsageError(kind + " needs --triad");
        return parse_triad(triad);
    };
    auto with_bound = [&](double measured, double def) {
        m.measured = measured;
        m.bound = bound >= 0 ? bound : def;
        m.pass = measured <= m.bound;
    };
    if (kind == "u2" || kind == "u3") {
        auto f = to_complex(balanced(A));
        with_bound(kind == "u2" ? u2_norm(g, f) : u3_norm(g, f), 1.0);
    } else if (kind == "dev2") {
        auto B = need_factor();
        auto d = need_triad();
        double worst = 0;
        for (const auto& G : triad_graphs(g, B, d)) worst = std::max(worst, dev2_measure(G).eps);
        with_bound(worst, 0.05);
    } else if (kind == "dev23") {
        auto B = need_factor();
        auto d = need_triad();
        if (!d.ternary()) throw UsageError("dev23 needs a ternary triad");
        auto r = dev23_measure(build_triad(g, B, d), A);
        with_bound(r.eps1, 0.05);
        m.detail = "d2=" + std::to_string(r.d2) + " eps2=" + std::to_string(r.eps2) + " d3=" + std::to_string(r.d3);
    } else if (kind == "oct") {
        auto B = need_factor();
        with_bound(std::abs(oct_measure(g, B, need_triad(), A)), 0.05);
    } else if (kind == "density-transfer") {
        auto B = need_factor();
        m = density_transfer_check(A, B, need_triad(), bound >= 0 ? bound : 0.05);
    } else if (kind == "k222") {
        auto B = need_factor();
        auto d = need_triad();
        if (!d.ternary()) throw UsageError("k222 needs a ternary triad");
        m = hom_count_check(build_triad(g, B, d), bound >= 0 ? bound : 0.05);
    } else {
        throw UsageError("unknown measure '" + kind + "'");
    }
    json out = {{"name", kind},
                {"measured", m.measured},
                {"bound", m.bound},
                {"status", m.pass ? "PASS" : "FAIL"},
                {"runtime_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()}};
    if (!m.bound_formula.empty()) out["bound_formula"] = m.bound_formula;
    if (!m.detail.empty()) out["detail"] = m.detail;
    std::cout << out.dump(2) << "\n";
    return m.pass ? 0 : kExitFail;
}

int cmd_factor(const std::string& action, const std::string& path, const std::string& fn, const std::string& rows,
               const std::string& out_path) {
    const QuadraticFactor B = read_factor_file(path);
    json out = {{"action", action}, {"p", B.p()}, {"n", B.n()}, {"ell", B.ell()}, {"q", B.q()}};
    QuadraticFactor result;
    bool has_result = false;
    if (action == "rank") {
        out["rank"] = factor_rank(B);
    } else if (action == "repair") {
        auto h = make_high_rank(B, RankFunction(fn), B.ell() + B.q());
        out["rank"] = h.rank;
        out["target"] = h.target;
        out["deleted"] = h.steps;
        out["refines"] = refines(GroupSpec(B.p(), B.n()), h.factor, B);
        result = h.factor;
        has_result = true;
    } else if (action == "pullback") {
        if (rows.empty()) throw UsageError("pullback needs --rows");
        std::vector<std::vector<int>> R;
        for (std::size_t pos = 0; pos <= rows.size();) {
            std::size_t end = rows.find(';', pos);
            if (end == std::string::npos) end = rows.size();
            R.push_back(parse_vector(rows.substr(pos, end - pos), B.p(), B.label_dims()).coords());
            pos = end + 1;
        }
        auto pb = pullback_factor(B, R);
        out["case"] = pb.lemma_case;
        out["rank"] = pb.rank;
        out["reductions"] = pb.reductions;
        result = pb.factor;
        has_result = true;
    } else {
        throw UsageError("unknown factor action '" + action + "'");
    }
    if (has_result) {
        out["result_ell"] = result.ell();
        out["result_q"] = result.q();
        if (!out_path.empty()) write_file(out_path, format_factor(result));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_regularize(const std::string& set, double eps, const std::string& psi, int max_codim, const std::string& chain) {
    const GroupSubset A = parse_set_spec(set);
    StableParams sp;
    sp.eps = eps;
    sp.psi = GrowthFunction(psi);
    sp.max_codim = max_codim;
    auto r = stable_linear_decomposition(A, LinearFactor{A.spec().p(), A.spec().n(), {}}, {}, sp);
    json vs = json::array();
    for (const auto& v : r.sub.vectors) vs.push_back(v.digits());
    json out = {{"set", set},
                {"eps", eps},
                {"m", r.m},
                {"vectors", vs},
                {"error_cosets", r.omega.size()},
                {"error_bound", r.omega_bound},
                {"threshold", r.threshold},
                {"error_fraction_by_m", r.error_fraction_by_m},
                {"status", r.pass ? "PASS" : "FAIL"}};
    auto check = factor_chain_check(r.chain, A);
    out["chain_steps"] = r.chain.T();
    out["chain_valid"] = check.all();
    if (!chain.empty()) write_file(chain, chain_json(A.spec(), r.chain).dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return r.pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qfa: finite-field quadratic Fourier analysis toolkit"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run a check suite");
    std::string suite, config, json_path, format = "text";
    int vp = 3, vn = 0;
    double veps = 0;
    std::uint64_t seed = kDefaultSeed;
    verify->add_option("--suite", suite, "gs | quadric | qgs | uniformity | closure | regularize | appendix");
    auto* op_p = verify->add_option("--p", vp, "prime");
    auto* op_n = verify->add_option("--n", vn, "size override (0: suite default)");
    auto* op_e = verify->add_option("--eps", veps, "eps override (0: suite default)");
    auto* op_s = verify->add_option("--seed", seed, "random seed");
    verify->add_option("--json", json_path, "also write the JSON report here");
    verify->add_option("--config", config, "key=value config file; flags win");
    verify->add_option("--format", format, "stdout format")->check(CLI::IsMember({"text", "json"}));

    auto* detect = app.add_subcommand("detect", "search for a witness");
    std::string dkind, dset;
    int dk = 2;
    bool dwit = false, dexh = false;
    detect->add_option("kind", dkind, "op | hop2 | fop2 | vc | vc2 | cap2 | tree")->required();
    detect->add_option("--set", dset, "set spec")->required();
    detect->add_option("--k", dk, "order (depth for tree)");
    detect->add_flag("--witness", dwit, "print the witness");
    detect->add_flag("--exhaustive", dexh, "no node limit");

    auto* measure = app.add_subcommand("measure", "quasirandomness measures");
    std::string mkind, mset, mfactor, mtriad;
    double mbound = -1;
    measure->add_option("kind", mkind, "u2 | u3 | dev2 | dev23 | oct | density-transfer | k222")->required();
    measure->add_option("--set", mset, "set spec")->required();
    measure->add_option("--factor", mfactor, "factor file");
    measure->add_option("--triad", mtriad, "triad as JSON");
    measure->add_option("--bound", mbound, "pass threshold");

    auto* factor = app.add_subcommand("factor", "factor tools");
    std::string faction, fpath, ffn = "x", frows, fout;
    factor->add_option("action", faction, "rank | repair | pullback")->required();
    factor->add_option("--factor", fpath, "factor file")->required();
    factor->add_option("--target-rank-fn", ffn, "rank function for repair");
    factor->add_option("--rows", frows, "pullback vectors over the label coordinates, ';'-separated");
    factor->add_option("--out", fout, "write the resulting factor here");

    auto* regularize = app.add_subcommand("regularize", "stable linear decomposition");
    std::string rset, rpsi = "2*x", rchain;
    double reps = 0.1;
    int rcodim = 8;
    regularize->add_option("--set", rset, "set spec")->required();
    regularize->add_option("--eps", reps, "eps");
    regularize->add_option("--psi", rpsi, "threshold growth function");
    regularize->add_option("--max-codim", rcodim, "codimension cap");
    regularize->add_option("--emit-chain", rchain, "write the factor chain as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*verify) {
            std::map<std::string, std::string> flags;
            if (!suite.empty()) flags["suite"] = suite;
            if (*op_p) flags["p"] = std::to_string(vp);
            if (*op_n) flags["n"] = std::to_string(vn);
            if (*op_e) flags["eps"] = std::to_string(veps);
            if (*op_s) flags["seed"] = std::to_string(seed);
            return cmd_verify(suite, config, flags, json_path, format);
        }
        if (*detect) return cmd_detect(dkind, dset, dk, dwit, dexh);
        if (*measure) return cmd_measure(mkind, mset, mfactor, mtriad, mbound);
        if (*factor) return cmd_factor(faction, fpath, ffn, frows, fout);
        if (*regularize) return cmd_regularize(rset, reps, rpsi, rcodim, rchain);
    } catch (const UsageError& e) {
        std::cerr << "qfa: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "qfa: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "qfa: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
