#pragma once

#include "iet/combinatorics.hpp"
#include "iet/iem.hpp"
#include "iet/scalar.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace iet::cli {

using Json = nlohmann::ordered_json;

// Parse errors carry the file name and byte offset; schema errors carry a JSON pointer.
Json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);  // "-" or empty: stdout
void write_json(const std::string& path, const Json& j);

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what);
const Json& member(const Json& j, const std::string& key, const std::string& pointer);

// {"top": "A B C", "bottom": "C B A"}; rows may also be arrays of names or unspaced one-character letters.
PermutationPair read_pi(const Json& j, const std::string& pointer);
Json write_pi(const PermutationPair& p);

// A rational "p/q" string, a decimal string, or {"bits": b, "hex": "0x..."}.
Rational read_rational(const Json& j, const std::string& pointer);
BigFloat read_bigfloat(const Json& j, const std::string& pointer);
Json write_bigfloat(const BigFloat& x);

enum class Numeric { Rational, BigFloat };

// Standard map read from {"pi": ..., "lengths": [...], "numeric": "rational" | "bigfloat", "origin": ...}.
// Lengths are parallel to the alphabet, or an object keyed by letter names.
struct IemInput {
    Numeric numeric = Numeric::BigFloat;
    StandardIEM<Rational> exact;
    StandardIEM<BigFloat> real;
    Json raw;
    std::string loop;  // present in exported fixtures
};
IemInput read_iem(const std::string& path);

std::string half_point_name(const PermutationPair& p, const HalfPoint& h);
std::string num(double x);

}  // namespace iet::cli
