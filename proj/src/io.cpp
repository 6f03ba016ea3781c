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

#include "qfa/io.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "qfa/constructions.hpp"

namespace qfa {

namespace {

[[noreturn]] void fail_at(std::size_t pos, const std::string& msg) {
    throw ParseError("set spec, position " + std::to_string(pos) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct Param {
    std::string value;
    std::size_t pos;  // of the value
};

class Params {
   public:
    Params(const std::string& text, std::size_t start, const std::set<std::string>& allowed) {
        std::size_t pos = start;
        while (pos < text.size()) {
            std::size_t end = text.find(',', pos);
            if (end == std::string::npos) end = text.size();
            const std::string item = text.substr(pos, end - pos);
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos || eq == 0) fail_at(pos, "expected key=value, got '" + item + "'");
            const std::string key = item.substr(0, eq);
            if (!allowed.count(key)) fail_at(pos, "unknown key '" + key + "'");
            if (map_.count(key)) fail_at(pos, "duplicate key '" + key + "'");
            map_[key] = {item.substr(eq + 1), pos + eq + 1};
            pos = end + 1;
        }
    }
    bool has(const std::string& k) const { return map_.count(k) != 0; }
    const Param& at(const std::string& k, std::size_t name_end) const {
        auto it = map_.find(k);
        if (it == map_.end()) fail_at(name_end, "missing key '" + k + "'");
        return it->second;
    }
    int integer(const std::string& k, std::size_t name_end, int def, bool required = false) const {
        if (!has(k)) {
            if (required) fail_at(name_end, "missing key '" + k + "'");
            return def;
        }
        const Param& p = map_.at(k);
        if (p.value.empty()) fail_at(p.pos, "empty value for '" + k + "'");
        std::size_t i = p.value[0] == '-' ? 1 : 0;
        if (i == p.value.size()) fail_at(p.pos, "bad integer '" + p.value + "'");
        for (; i < p.value.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(p.value[i]))) fail_at(p.pos + i, "bad integer '" + p.value + "'");
        try {
            return std::stoi(p.value);
        } catch (const std::out_of_range&) {
            fail_at(p.pos, "integer out of range '" + p.value + "'");
        }
    }

   private:
    std::map<std::string, Param> map_;
};

std::vector<FpVector> vector_list(const Param& par, int p, int n) {
    std::vector<FpVector> out;
    std::size_t pos = 0;
    while (pos <= par.value.size()) {
        std::size_t end = par.value.find(';', pos);
        if (end == std::string::npos) end = par.value.size();
        const std::string item = par.value.substr(pos, end - pos);
        try {
            out.push_back(parse_vector(item, p, n));
        } catch (const ParseError& e) {
            fail_at(par.pos + pos, e.what());
        }
        pos = end + 1;
    }
    return out;
}

GroupSubset read_set_file(const std::string& path, std::size_t pos) {
    std::ifstream in(path);
    if (!in) fail_at(pos, "cannot open '" + path + "'");
    int p = 3, n = -1;
    std::vector<std::string> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("p=", 0) == 0) {
            if (!rows.empty()) throw ParseError(path + ":" + std::to_string(lineno) + ": p= must precede the members");
            try {
                p = std::stoi(line.substr(2));
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad prime '" + line + "'");
            }
            continue;
        }
        rows.push_back(line);
    }
    if (rows.empty()) throw ParseError(path + ": no members listed");
    n = static_cast<int>(rows[0].size());
    GroupSpec g(p, n);
    GroupSubset A(g);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            A.insert(g.index_of(parse_vector(rows[i], p, n)));
        } catch (const ParseError& e) {
            throw ParseError(path + ": member " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return A;
}

}  // namespace

FpVector parse_vector(const std::string& digits, int p, int n) {
    if (digits.empty()) throw ParseError("empty vector");
    if (p > 10) throw ParseError("digit-string vectors need p <= 10");
    if (n >= 0 && static_cast<int>(digits.size()) != n)
        throw ParseError("vector '" + digits + "' has length " + std::to_string(digits.size()) + ", expected " +
                         std::to_string(n));
    std::vector<int> c;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const char ch = digits[i];
        if (!std::isdigit(static_cast<unsigned char>(ch)) || ch - '0' >= p)
            throw ParseError("bad digit '" + std::string(1, ch) + "' at offset " + std::to_string(i) + " in '" + digits + "'");
        c.push_back(ch - '0');
    }
    return FpVector(p, c);
}

std::string format_vector(const FpVector& v) { return v.digits(); }

GroupSubset parse_set_spec(const std::string& text) {
    const std::size_t colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::size_t vstart = colon == std::string::npos ? text.size() : colon + 1;
    if (name == "file") {
        if (vstart >= text.size()) fail_at(vstart, "file: needs a path");
        return read_set_file(text.substr(vstart), vstart);
    }
    static const std::map<std::string, std::set<std::string>> keys = {
        {"gs", {"p", "n"}},
        {"qgs", {"p", "n"}},
        {"quadric", {"p", "n", "c"}},
        {"sparse", {"p", "n"}},
        {"union-cosets", {"p", "n", "h", "reps"}},
    };
    auto it = keys.find(name);
    if (it == keys.end()) fail_at(0, "unknown set name '" + name + "'");
    Params prm(text, vstart, it->second);
    const std::size_t ne = name.size();
    const int p = prm.integer("p", ne, 3);
    if (p < 3 || !is_prime(p)) fail_at(prm.has("p") ? prm.at("p", ne).pos : ne, "bad prime " + std::to_string(p));
    const int n = prm.integer("n", ne, 0, true);
    if (n < 1) fail_at(prm.at("n", ne).pos, "n must be positive");
    try {
        if (name == "gs") return gs(n, p);
        if (name == "qgs") return qgs(n, p).set;
        if (name == "quadric") {
            const int c = prm.integer("c", ne, 0);
            if (c < 0 || c >= p) fail_at(prm.at("c", ne).pos, "c must lie in [0, p)");
            return standard_quadric(n, p, c);
        }
        if (name == "sparse") return sparse_example(n, p);
        // union-cosets
        GroupSpec g(p, n);
        LinearFactor H{p, n, prm.has("h") ? vector_list(prm.at("h", ne), p, n) : std::vector<FpVector>{}};
        auto reps = vector_list(prm.at("reps", ne), p, n);
        return union_of_cosets(g, H, reps);
    } catch (const CapacityError& e) {
        fail_at(ne, e.what());
    } catch (const ValidationError& e) {
        fail_at(ne, e.what());
    }
}

namespace {

std::vector<int> parse_row(const std::string& line, int p, int n, int lineno) {
    auto bad = [&](const std::string& m) { return ParseError("factor line " + std::to_string(lineno) + ": " + m); };
    std::vector<int> row;
    if (line.find_first_of(" \t") == std::string::npos) {
        try {
            return parse_vector(line, p, n).coords();
        } catch (const ParseError& e) {
            throw bad(e.what());
        }
    }
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        int v = 0;
        try {
            std::size_t used = 0;
            v = std::stoi(tok, &used);
            if (used != tok.size()) throw ParseError("");
        } catch (const std::exception&) {
            throw bad("bad entry '" + tok + "'");
        }
        if (v < 0 || v >= p) throw bad("entry " + tok + " not in [0, p)");
        row.push_back(v);
    }
    if (static_cast<int>(row.size()) != n) throw bad("expected " + std::to_string(n) + " entries");
    return row;
}

}  // namespace

QuadraticFactor parse_factor(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;
    std::istringstream in(text);
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (!line.empty()) lines.emplace_back(lineno, line);
    }
    if (lines.empty()) throw ParseError("factor: empty input");
    int p = 0, n = 0, ell = 0, q = 0;
    {
        std::istringstream head(lines[0].second);
        std::string extra;
        if (!(head >> p >> n >> ell >> q) || (head >> extra))
            throw ParseError("factor line " + std::to_string(lines[0].first) + ": expected \"p n ell q\"");
    }
    if (p < 2 || !is_prime(p)) throw ParseError("factor: bad prime " + std::to_string(p));
    if (n < 1 || ell < 0 || q < 0) throw ParseError("factor: bad dimensions");
    const std::size_t need = 1 + std::size_t(ell) + std::size_t(q) * std::size_t(n);
    const bool general = lines.size() == need + std::size_t(q) && q > 0;
    if (lines.size() != need && !general)
        throw ParseError("factor: expected " + std::to_string(need) + " non-comment lines (or " +
                         std::to_string(need + q) + " with shifts), got " + std::to_string(lines.size()));
    std::size_t at = 1;
    std::vector<FpVector> L, shifts;
    std::vector<FpSymMatrix> M;
    for (int i = 0; i < ell; ++i, ++at) L.emplace_back(p, parse_row(lines[at].second, p, n, lines[at].first));
    for (int j = 0; j < q; ++j) {
        std::vector<std::vector<int>> rows;
        const int first = lines[at].first;
        for (int r = 0; r < n; ++r, ++at) rows.push_back(parse_row(lines[at].second, p, n, lines[at].first));
        try {
            M.emplace_back(p, rows);
        } catch (const std::exception& e) {
            throw ParseError("factor matrix at line " + std::to_string(first) + ": " + e.what());
        }
    }
    if (general)
        for (int j = 0; j < q; ++j, ++at) shifts.emplace_back(p, parse_row(lines[at].second, p, n, lines[at].first));
    return QuadraticFactor(p, n, L, M, shifts);
}

QuadraticFactor read_factor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open factor file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_factor(ss.str());
}

std::string format_factor(const QuadraticFactor& B) {
    const int n = B.n();
    std::string out = std::to_string(B.p()) + " " + std::to_string(n) + " " + std::to_string(B.linear().size()) + " " +
                      std::to_string(B.q()) + "\n";
    auto row = [&](auto get) {
        std::string s;
        for (int c = 0; c < n; ++c) s += std::to_string(get(c)) + (c + 1 < n ? " " : "\n");
        return s;
    };
    for (const auto& v : B.linear()) out += row([&](int c) { return v[c]; });
    for (const auto& m : B.quadratic())
        for (int r = 0; r < n; ++r) out += row([&](int c) { return m.at(r, c); });
    for (const auto& u : B.shifts()) out += row([&](int c) { return u[c]; });
    return out;
}

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace qfa
