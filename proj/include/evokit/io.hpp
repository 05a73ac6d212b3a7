#pragma once

// JSON file formats.
//   algebra:     {"dim": n, "field": "rational" | "complex", "rows": [[s, ...], ...]}
//   permutation: {"field": ..., "perm": [1-based images], "coeffs": [s, ...]}
// Scalars are strings in the scalar text syntax ("p/q", "a+bi", ...).

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "evokit/permutation.hpp"

namespace evokit {

using Json = nlohmann::json;

using AnyAlgebra = std::variant<EvolutionAlgebra<Rational>, EvolutionAlgebra<Complex>>;
using AnyPermutationAlgebra = std::variant<PermutationAlgebra<Rational>, PermutationAlgebra<Complex>>;

struct InputDocument {
  std::variant<AnyAlgebra, AnyPermutationAlgebra> content;

  bool is_permutation() const { return content.index() == 1; }
  Domain domain() const {
    return std::visit([](const auto& c) { return std::visit([](const auto& x) { return domain_of(x); }, c); },
                      content);
  }
  /// The evolution algebra itself (permutation inputs are expanded).
  AnyAlgebra algebra() const {
    if (!is_permutation()) return std::get<AnyAlgebra>(content);
    return std::visit([](const auto& p) -> AnyAlgebra { return p.algebra(); }, std::get<AnyPermutationAlgebra>(content));
  }

 private:
  template <Field T>
  static Domain domain_of(const EvolutionAlgebra<T>&) { return field_traits<T>::domain; }
  template <Field T>
  static Domain domain_of(const PermutationAlgebra<T>&) { return field_traits<T>::domain; }
};

namespace detail {

/// Locates values inside raw JSON text by key / index path to report line numbers.
class JsonLocator {
 public:
  explicit JsonLocator(std::string_view text) : text_(text) {}

  /// 1-based line of the value at the path (object keys and array indices), or of the
  /// deepest prefix that could be found; 0 if nothing matched.
  std::size_t line_of(const std::vector<std::variant<std::string, std::size_t>>& path) const {
    std::size_t pos = skip_ws(0);
    std::size_t found = 0;
    for (const auto& step : path) {
      std::size_t next = std::string_view::npos;
      if (const auto* key = std::get_if<std::string>(&step))
        next = find_key(pos, *key);
      else
        next = find_index(pos, std::get<std::size_t>(step));
      if (next == std::string_view::npos) break;
      pos = next;
      found = line_at(pos);
    }
    return found;
  }

  std::size_t line_at(std::size_t pos) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    return line;
  }

 private:
  std::size_t skip_ws(std::size_t p) const {
    while (p < text_.size() && (text_[p] == ' ' || text_[p] == '\t' || text_[p] == '\n' || text_[p] == '\r')) ++p;
    return p;
  }

  /// Position just past the string starting at p (which must be a quote).
  std::size_t skip_string(std::size_t p) const {
    ++p;
    while (p < text_.size() && text_[p] != '"') p += text_[p] == '\\' ? 2 : 1;
    return p + 1;
  }

  /// Position just past the value starting at p.
  std::size_t skip_value(std::size_t p) const {
    if (p >= text_.size()) return p;
    if (text_[p] == '"') return skip_string(p);
    if (text_[p] == '{' || text_[p] == '[') {
      int depth = 0;
      while (p < text_.size()) {
        const char c = text_[p];
        if (c == '"') {
          p = skip_string(p);
          continue;
        }
        if (c == '{' || c == '[') ++depth;
        if (c == '}' || c == ']') {
          if (--depth == 0) return p + 1;
        }
        ++p;
      }
      return p;
    }
    while (p < text_.size() && text_[p] != ',' && text_[p] != '}' && text_[p] != ']') ++p;
    return p;
  }

  std::size_t find_key(std::size_t p, const std::string& key) const {
    p = skip_ws(p);
    if (p >= text_.size() || text_[p] != '{') return std::string_view::npos;
    p = skip_ws(p + 1);
    while (p < text_.size() && text_[p] == '"') {
      const std::size_t end = skip_string(p);
      const std::string_view k = text_.substr(p + 1, end - p - 2);
      p = skip_ws(end);
      if (p >= text_.size() || text_[p] != ':') return std::string_view::npos;
      p = skip_ws(p + 1);
      if (k == key) return p;
      p = skip_ws(skip_value(p));
      if (p < text_.size() && text_[p] == ',') p = skip_ws(p + 1);
    }
    return std::string_view::npos;
  }

  std::size_t find_index(std::size_t p, std::size_t index) const {
    p = skip_ws(p);
    if (p >= text_.size() || text_[p] != '[') return std::string_view::npos;
    p = skip_ws(p + 1);
    for (std::size_t i = 0; p < text_.size() && text_[p] != ']'; ++i) {
      if (i == index) return p;
      p = skip_ws(skip_value(p));
      if (p < text_.size() && text_[p] == ',') p = skip_ws(p + 1);
    }
    return std::string_view::npos;
  }

  std::string_view text_;
};

using JsonPath = std::vector<std::variant<std::string, std::size_t>>;

inline std::string path_name(const JsonPath& path) {
  std::string s;
  for (const auto& step : path) {
    if (const auto* key = std::get_if<std::string>(&step))
      s += (s.empty() ? "" : ".") + *key;
    else
      s += "[" + std::to_string(std::get<std::size_t>(step)) + "]";
  }
  return s;
}

class DocumentReader {
 public:
  DocumentReader(std::string_view text, Json doc) : locator_(text), doc_(std::move(doc)) {}

  [[noreturn]] void fail(const JsonPath& path, const std::string& what) const {
    throw ParseError(path_name(path), locator_.line_of(path), what);
  }

  const Json& require(const std::string& key) const {
    if (!doc_.contains(key)) fail({key}, "missing required field");
    return doc_.at(key);
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  Domain domain() const {
    const Json& f = require("field");
    if (!f.is_string()) fail({"field"}, "expected \"rational\" or \"complex\"");
    const auto s = f.get<std::string>();
    if (s == "rational") return Domain::rational;
    if (s == "complex") return Domain::complex;
    fail({"field"}, "unknown field '" + s + "', expected \"rational\" or \"complex\"");
  }

  template <Field T>
  T scalar(const Json& v, const JsonPath& path) const {
    if (!v.is_string()) fail(path, "expected a scalar string");
    try {
      return parse_scalar<T>(v.get<std::string>());
    } catch (const ParseError& e) {
      fail(path, e.what());
    } catch (const Error& e) {
      fail(path, e.what());
    }
  }

  template <Field T>
  std::vector<T> scalar_array(const std::string& key, std::optional<std::size_t> expected) const {
    const Json& arr = require(key);
    if (!arr.is_array()) fail({key}, "expected an array of scalar strings");
    if (expected && arr.size() != *expected)
      fail({key}, "expected " + std::to_string(*expected) + " entries, found " + std::to_string(arr.size()));
    std::vector<T> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(scalar<T>(arr[i], {key, i}));
    return out;
  }

  template <Field T>
  EvolutionAlgebra<T> algebra() const {
    const Json& d = require("dim");
    if (!d.is_number_integer() || d.get<long long>() < 1) fail({"dim"}, "expected a positive integer");
    const auto n = static_cast<std::size_t>(d.get<long long>());
    const Json& rows = require("rows");
    if (!rows.is_array()) fail({"rows"}, "expected an array of rows");
    if (rows.size() != n) fail({"rows"}, "expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()));
    Matrix<T> a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const Json& row = rows[i];
      if (!row.is_array() || row.size() != n)
        fail({"rows", i}, "expected an array of " + std::to_string(n) + " scalar strings");
      for (std::size_t k = 0; k < n; ++k) a(i, k) = scalar<T>(row[k], {"rows", i, k});
    }
    return EvolutionAlgebra<T>(std::move(a));
  }

  template <Field T>
  PermutationAlgebra<T> permutation() const {
    const Json& p = require("perm");
    if (!p.is_array() || p.empty()) fail({"perm"}, "expected a nonempty array of 1-based images");
    std::vector<std::size_t> image;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_number_integer() || p[i].get<long long>() < 1)
        fail({"perm", i}, "expected a positive integer");
      image.push_back(static_cast<std::size_t>(p[i].get<long long>()));
    }
    Permutation perm;
    try {
      perm = Permutation::from_one_based(image);
    } catch (const Error& e) {
      fail({"perm"}, e.what());
    }
    if (has("dim") && (!doc_.at("dim").is_number_integer() || doc_.at("dim").get<long long>() != static_cast<long long>(image.size())))
      fail({"dim"}, "does not match the length of perm");
    return PermutationAlgebra<T>(std::move(perm), scalar_array<T>("coeffs", image.size()));
  }

 private:
  JsonLocator locator_;
  Json doc_;
};

}  // namespace detail

/// Parses an algebra or permutation-algebra document. Errors name the field and line.
inline InputDocument parse_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const detail::JsonLocator loc(text);
    throw ParseError("", loc.line_at(e.byte > 0 ? e.byte - 1 : 0), "malformed JSON");
  }
  if (!doc.is_object()) throw ParseError("", 1, "expected a JSON object");
  detail::DocumentReader reader(text, doc);
  const Domain dom = reader.domain();
  if (reader.has("perm") || reader.has("coeffs")) {
    if (reader.has("rows")) reader.fail({"rows"}, "a document holds either rows or perm/coeffs, not both");
    if (dom == Domain::rational) return {AnyPermutationAlgebra(reader.permutation<Rational>())};
    return {AnyPermutationAlgebra(reader.permutation<Complex>())};
  }
  if (dom == Domain::rational) return {AnyAlgebra(reader.algebra<Rational>())};
  return {AnyAlgebra(reader.algebra<Complex>())};
}

inline InputDocument read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", 0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

/// Comma-separated scalars ("1/2,3" or "1+2i,-i").
template <Field T>
std::vector<T> parse_scalar_list(std::string_view text, const std::string& field) {
  std::vector<T> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    try {
      out.push_back(parse_scalar<T>(piece));
    } catch (const Error& e) {
      throw ParseError(field, 0, e.what());
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

template <Field T>
Json to_json(const T& x) {
  return format_scalar(x);
}

template <Field T>
Json to_json(const std::vector<T>& v) {
  Json arr = Json::array();
  for (const auto& x : v) arr.push_back(format_scalar(x));
  return arr;
}

template <Field T>
Json to_json(const Matrix<T>& m) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) arr.push_back(to_json(m.row_vector(i)));
  return arr;
}

template <Field T>
Json to_json(const EvolutionAlgebra<T>& e) {
  return Json{{"dim", e.dim()}, {"field", to_string(field_traits<T>::domain)}, {"rows", to_json(e.structure())}};
}

template <Field T>
Json to_json(const PermutationAlgebra<T>& p) {
  return Json{{"dim", p.dim()},
              {"field", to_string(field_traits<T>::domain)},
              {"perm", p.perm.one_based()},
              {"coeffs", to_json(p.coeffs)}};
}

template <Field T>
Json to_json(const ChangeOfBasis<T>& cb) {
  return Json{{"field", to_string(field_traits<T>::domain)}, {"forward", to_json(cb.forward)}, {"residual", cb.residual}};
}

inline std::string serialize(const AnyAlgebra& e) {
  return std::visit([](const auto& x) { return to_json(x).dump(2); }, e);
}

inline std::string serialize(const AnyPermutationAlgebra& p) {
  return std::visit([](const auto& x) { return to_json(x).dump(2); }, p);
}

inline std::string serialize(const InputDocument& doc) {
  return std::visit([](const auto& x) { return serialize(x); }, doc.content);
}

}  // namespace evokit
