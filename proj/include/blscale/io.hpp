#pragma once

// JSON file formats. Exact rationals travel as "p/q" strings; floats are
// written with 17 significant digits and non-finite values as strings.

#include <iosfwd>
#include <string>

#include "blscale/datum.hpp"
#include "blscale/operator.hpp"
#include "blscale/polytope.hpp"
#include "json.hpp"

namespace blscale::io {

using Json = nlohmann::ordered_json;

// Throws ParseError with the offending field path (or line/column for
// malformed JSON).
Json parse_json(const std::string& text);
std::string read_file(const std::string& path);

// Entry: "p/q" string or JSON integer. Floats are accepted only when
// allow_float is set and are converted exactly.
Rational parse_entry(const Json& j, const std::string& where, bool allow_float = false);
RationalMat parse_matrix(const Json& j, const std::string& where, bool allow_float = false);
// "2/3,2/3,2/3" or a JSON array of entries.
std::vector<Rational> parse_rational_list(const std::string& text);

// {"n": int, "maps": [[[...]]], "p": {"numerators": [...], "denominator": d}}
// "p" may also be a list of rational strings.
BLDatum datum_from_json(const Json& j);
Json datum_to_json(const BLDatum& datum);

// {"n1": int, "n2": int, "kraus": [[[...]]]} with n2 x n1 matrices.
CPOperator operator_from_json(const Json& j);
Json operator_to_json(const CPOperator& op);

// {"n": int, "vectors": [[...]]}
VectorFamily family_from_json(const Json& j);
Json family_to_json(const VectorFamily& family);

Json rational(const Rational& q);
Json rational_list(const std::vector<Rational>& qs);
// List of columns, each a list of "p/q" strings.
Json columns(const RationalMat& m);
Json rows(const RationalMat& m);
Json real(double x);
Json real_list(const std::vector<double>& xs);
Json real_matrix(const RealMat& m);

std::string format_double(double x);  // %.17g, "inf", "-inf", "nan"
// Compact JSON with floats through format_double.
std::string dump(const Json& j);

}  // namespace blscale::io
