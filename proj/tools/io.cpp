#include "io.hpp"

#include "iet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace iet::cli {

Json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError(path + ": cannot write");
    out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void schema_error(const std::string& pointer, const std::string& what) {
    throw ParseError((pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& pointer) {
    if (!j.is_object()) schema_error(pointer, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(pointer + "/" + key, "missing");
    return *it;
}

namespace {

std::vector<std::string> read_row(const Json& j, const std::string& pointer) {
    std::vector<std::string> row;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_string()) schema_error(pointer + "/" + std::to_string(i), "expected a letter name");
            row.push_back(j[i].get<std::string>());
        }
    } else if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s.find(' ') != std::string::npos) {
            std::istringstream is(s);
            for (std::string w; is >> w;) row.push_back(w);
        } else {
            for (char c : s) row.emplace_back(1, c);
        }
    } else {
        schema_error(pointer, "expected a string or an array of letter names");
    }
    if (row.empty()) schema_error(pointer, "empty row");
    return row;
}

}  // namespace

PermutationPair read_pi(const Json& j, const std::string& pointer) {
    auto top = read_row(member(j, "top", pointer), pointer + "/top");
    auto bot = read_row(member(j, "bottom", pointer), pointer + "/bottom");
    if (top.size() != bot.size()) schema_error(pointer, "rows of different lengths");
    std::vector<std::string> alphabet = top;
    std::sort(alphabet.begin(), alphabet.end());
    if (std::adjacent_find(alphabet.begin(), alphabet.end()) != alphabet.end())
        schema_error(pointer + "/top", "repeated letter");
    std::vector<int> pt(top.size()), pb(top.size(), 0);
    for (std::size_t i = 0; i < top.size(); ++i) {
        auto a = std::lower_bound(alphabet.begin(), alphabet.end(), top[i]) - alphabet.begin();
        pt[a] = static_cast<int>(i) + 1;
    }
    for (std::size_t i = 0; i < bot.size(); ++i) {
        auto it = std::lower_bound(alphabet.begin(), alphabet.end(), bot[i]);
        if (it == alphabet.end() || *it != bot[i]) schema_error(pointer + "/bottom/" + std::to_string(i), "unknown letter");
        auto a = it - alphabet.begin();
        if (pb[a]) schema_error(pointer + "/bottom/" + std::to_string(i), "repeated letter");
        pb[a] = static_cast<int>(i) + 1;
    }
    return PermutationPair(alphabet, pt, pb);
}

Json write_pi(const PermutationPair& p) {
    Json top = Json::array(), bot = Json::array();
    for (int i = 0; i < p.size(); ++i) {
        top.push_back(p.name(p.top(i)));
        bot.push_back(p.name(p.bottom(i)));
    }
    return {{"top", top}, {"bottom", bot}};
}

Rational read_rational(const Json& j, const std::string& pointer) {
    if (j.is_object()) return to_rational(read_bigfloat(j, pointer));
    if (!j.is_string()) schema_error(pointer, "numbers are written as strings");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
        schema_error(pointer, e.what());
    }
}

BigFloat read_bigfloat(const Json& j, const std::string& pointer) {
    try {
        if (j.is_object()) {
            const auto& bits = member(j, "bits", pointer);
            if (!bits.is_number_unsigned() || bits.get<unsigned>() < 16) schema_error(pointer + "/bits", "expected a mantissa width");
            if (bits.get<unsigned>() > precision_bits()) set_precision_bits(bits.get<unsigned>());
            const auto& hex = member(j, "hex", pointer);
            if (!hex.is_string()) schema_error(pointer + "/hex", "expected a string");
            return parse_hex(hex.get<std::string>());
        }
        if (!j.is_string()) schema_error(pointer, "numbers are written as strings");
        const auto s = j.get<std::string>();
        if (s.find('/') != std::string::npos) return to_bigfloat(parse_rational(s));
        return parse_bigfloat(s);
    } catch (const ParseError& e) {
        schema_error(pointer, e.what());
    }
}

Json write_bigfloat(const BigFloat& x) { return {{"bits", precision_bits()}, {"hex", format_hex(x)}}; }

IemInput read_iem(const std::string& path) {
    IemInput in;
    in.raw = read_json(path);
    const Json& j = in.raw;
    auto pi = read_pi(member(j, "pi", ""), "/pi");
    std::string mode = "rational";
    if (j.contains("numeric")) {
        if (!j["numeric"].is_string()) schema_error("/numeric", "expected \"rational\" or \"bigfloat\"");
        mode = j["numeric"].get<std::string>();
    }
    if (mode != "rational" && mode != "bigfloat") schema_error("/numeric", "expected \"rational\" or \"bigfloat\"");
    in.numeric = mode == "rational" ? Numeric::Rational : Numeric::BigFloat;

    const Json& lj = member(j, "lengths", "");
    std::vector<const Json*> cells(pi.size(), nullptr);
    std::vector<std::string> ptrs(pi.size());
    if (lj.is_array()) {
        if (static_cast<int>(lj.size()) != pi.size()) schema_error("/lengths", "one length per letter required");
        for (int a = 0; a < pi.size(); ++a) {
            cells[a] = &lj[a];
            ptrs[a] = "/lengths/" + std::to_string(a);
        }
    } else if (lj.is_object()) {
        for (int a = 0; a < pi.size(); ++a) {
            cells[a] = &member(lj, pi.name(a), "/lengths");
            ptrs[a] = "/lengths/" + pi.name(a);
        }
    } else {
        schema_error("/lengths", "expected an array or an object keyed by letter");
    }
    const Json zero = "0";
    const Json& oj = j.contains("origin") ? j["origin"] : zero;

    // widest mantissa first, so that every value is read at full precision
    for (int a = 0; a < pi.size(); ++a)
        if (cells[a]->is_object()) read_bigfloat(*cells[a], ptrs[a]);

    if (in.numeric == Numeric::Rational) {
        std::vector<Rational> len;
        for (int a = 0; a < pi.size(); ++a) len.push_back(read_rational(*cells[a], ptrs[a]));
        in.exact = StandardIEM<Rational>(pi, len, read_rational(oj, "/origin"));
        std::vector<BigFloat> lf;
        for (const auto& q : len) lf.push_back(to_bigfloat(q));
        in.real = StandardIEM<BigFloat>(pi, lf, to_bigfloat(in.exact.origin()));
    } else {
        std::vector<BigFloat> len;
        for (int a = 0; a < pi.size(); ++a) len.push_back(read_bigfloat(*cells[a], ptrs[a]));
        in.real = StandardIEM<BigFloat>(pi, len, read_bigfloat(oj, "/origin"));
    }
    if (j.contains("loop")) {
        if (!j["loop"].is_string()) schema_error("/loop", "expected a string of t and b");
        in.loop = j["loop"].get<std::string>();
    }
    return in;
}

std::string half_point_name(const PermutationPair& p, const HalfPoint& h) {
    return p.name(h.letter) + (h.side == Side::L ? ":L" : ":R");
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace iet::cli
