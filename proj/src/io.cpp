#include "blscale/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blscale/error.hpp"

namespace blscale::io {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Recover line and column from the byte offset.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(col));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Rational parse_entry(const Json& j, const std::string& where, bool allow_float) {
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return Rational(mpz_class(j.get<std::uint64_t>()));
    return Rational(mpz_class(static_cast<long>(j.get<std::int64_t>())));
  }
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!allow_float) throw ParseError(where + ": write non-integer entries as \"p/q\" strings");
    if (!std::isfinite(x)) throw ParseError(where + ": entry is not finite");
    return Rational(x);
  }
  throw ParseError(where + ": expected a number or a \"p/q\" string");
}

RationalMat parse_matrix(const Json& j, const std::string& where, bool allow_float) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a nonempty list of rows");
  const std::size_t r = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ParseError(where + "[0]: expected a nonempty row");
  const std::size_t c = j[0].size();
  RationalMat m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    const std::string row = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != c) {
      throw ParseError(row + ": expected a row of " + std::to_string(c) + " entries");
    }
    for (std::size_t k = 0; k < c; ++k)
      m(i, k) = parse_entry(j[i][k], row + "[" + std::to_string(k) + "]", allow_float);
  }
  return m;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::string t = text;
  if (!t.empty() && t.front() == '[') {
    const Json j = parse_json(t);
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(parse_entry(j[i], "p[" + std::to_string(i) + "]"));
    return out;
  }
  std::stringstream s(t);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      out.push_back(parse_rational(item));
    } catch (const ParseError& e) {
      throw ParseError("p[" + std::to_string(out.size()) + "]: " + e.what());
    }
  }
  if (out.empty()) throw ParseError("p: empty exponent list");
  return out;
}

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw ParseError("top level: expected a JSON object");
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + name + "\"");
  return *it;
}

std::size_t positive_int(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw ParseError(std::string(name) + ": expected a positive integer");
  }
  return static_cast<std::size_t>(v.get<std::int64_t>());
}

std::int64_t positive_int64(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw ParseError(where + ": expected a positive integer");
  }
  return v.get<std::int64_t>();
}

Exponents parse_exponents(const Json& p) {
  if (p.is_array()) {
    std::vector<Rational> qs;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const std::string where = "p[" + std::to_string(i) + "]";
      qs.push_back(parse_entry(p[i], where));
      if (qs.back() <= 0) throw ParseError(where + ": exponents must be positive");
    }
    return Exponents::from_rationals(qs);
  }
  if (!p.is_object()) throw ParseError("p: expected {\"numerators\", \"denominator\"} or a list");
  const Json& num = field(p, "numerators");
  if (!num.is_array()) throw ParseError("p.numerators: expected a list");
  std::vector<std::int64_t> c;
  for (std::size_t i = 0; i < num.size(); ++i)
    c.push_back(positive_int64(num[i], "p.numerators[" + std::to_string(i) + "]"));
  return Exponents(std::move(c), positive_int64(field(p, "denominator"), "p.denominator"));
}

}  // namespace

BLDatum datum_from_json(const Json& j) {
  const std::size_t n = positive_int(j, "n");
  const Json& maps = field(j, "maps");
  if (!maps.is_array() || maps.empty()) throw ParseError("maps: expected a nonempty list");
  std::vector<RationalMat> bs;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const std::string where = "maps[" + std::to_string(k) + "]";
    bs.push_back(parse_matrix(maps[k], where));
    if (bs.back().cols() != n) {
      throw ParseError(where + ": rows have " + std::to_string(bs.back().cols()) +
                       " entries, expected n = " + std::to_string(n));
    }
  }
  Exponents e = parse_exponents(field(j, "p"));
  if (e.size() != bs.size()) {
    throw ParseError("p: " + std::to_string(e.size()) + " exponents for " + std::to_string(bs.size()) +
                     " maps");
  }
  return BLDatum(n, std::move(bs), std::move(e));
}

Json datum_to_json(const BLDatum& datum) {
  Json j;
  j["n"] = datum.n();
  Json maps = Json::array();
  for (const auto& b : datum.maps()) maps.push_back(rows(b));
  j["maps"] = std::move(maps);
  j["p"] = {{"numerators", datum.exponents().numerators},
            {"denominator", datum.exponents().denominator}};
  return j;
}

CPOperator operator_from_json(const Json& j) {
  const std::size_t n1 = positive_int(j, "n1");
  const std::size_t n2 = positive_int(j, "n2");
  const Json& kraus = field(j, "kraus");
  if (!kraus.is_array() || kraus.empty()) throw ParseError("kraus: expected a nonempty list");
  std::vector<RationalMat> ks;
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    const std::string where = "kraus[" + std::to_string(k) + "]";
    ks.push_back(parse_matrix(kraus[k], where, true));
    if (ks.back().rows() != n2 || ks.back().cols() != n1) {
      throw ParseError(where + ": expected n2 x n1 = " + std::to_string(n2) + "x" +
                       std::to_string(n1));
    }
  }
  return CPOperator::from_exact(std::move(ks));
}

Json operator_to_json(const CPOperator& op) {
  Json j;
  j["n1"] = op.n1();
  j["n2"] = op.n2();
  Json ks = Json::array();
  if (op.exact()) {
    for (const auto& a : *op.exact()) ks.push_back(rows(a));
  } else {
    for (const auto& a : op.kraus()) ks.push_back(rows(RationalMat::from_real(a)));
  }
  j["kraus"] = std::move(ks);
  return j;
}

VectorFamily family_from_json(const Json& j) {
  const std::size_t n = positive_int(j, "n");
  const Json& vs = field(j, "vectors");
  if (!vs.is_array() || vs.empty()) throw ParseError("vectors: expected a nonempty list");
  std::vector<std::vector<Rational>> out;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const std::string where = "vectors[" + std::to_string(k) + "]";
    if (!vs[k].is_array() || vs[k].size() != n) {
      throw ParseError(where + ": expected " + std::to_string(n) + " entries");
    }
    std::vector<Rational> v;
    for (std::size_t i = 0; i < n; ++i)
      v.push_back(parse_entry(vs[k][i], where + "[" + std::to_string(i) + "]"));
    out.push_back(std::move(v));
  }
  try {
    return VectorFamily(n, std::move(out));
  } catch (const DimensionMismatch& e) {
    throw ParseError(std::string("vectors: ") + e.what());
  }
}

Json family_to_json(const VectorFamily& family) {
  Json j;
  j["n"] = family.n;
  Json vs = Json::array();
  for (const auto& v : family.vectors) vs.push_back(rational_list(v));
  j["vectors"] = std::move(vs);
  return j;
}

Json rational(const Rational& q) { return to_string(q); }

Json rational_list(const std::vector<Rational>& qs) {
  Json j = Json::array();
  for (const auto& q : qs) j.push_back(rational(q));
  return j;
}

Json columns(const RationalMat& m) {
  Json j = Json::array();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    Json col = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) col.push_back(rational(m(r, c)));
    j.push_back(std::move(col));
  }
  return j;
}

Json rows(const RationalMat& m) { return columns(m.transpose()); }

Json real(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json real_list(const std::vector<double>& xs) {
  Json j = Json::array();
  for (double x : xs) j.push_back(real(x));
  return j;
}

Json real_matrix(const RealMat& m) {
  Json j = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(real(m(r, c)));
    j.push_back(std::move(row));
  }
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_to(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_to(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_to(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_to(j, out);
  return out;
}

}  // namespace blscale::io
