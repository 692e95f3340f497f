#include "slantmap/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "slantmap/catalog.hpp"

namespace slantmap {

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.is_object()) throw SpecError(at, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SpecError(at + "/" + key, "missing required field");
  return *it;
}

Expression expression_at(const json& v, int dim, const std::string& at) {
  std::string text;
  if (v.is_string())
    text = v.get<std::string>();
  else if (v.is_number())
    text = format_literal(v.get<double>());
  else
    throw SpecError(at, "expected an expression string or a number");
  try {
    return parse_expression(text, dim);
  } catch (const ParseError& e) {
    throw SpecError(at, e.what());
  }
}

ExpressionMatrix matrix_at(const json& v, int dim, const std::string& at) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw SpecError(at, "expected " + std::to_string(dim) + " rows");
  ExpressionMatrix out;
  for (int i = 0; i < dim; ++i) {
    const std::string row_at = at + "/" + std::to_string(i);
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw SpecError(row_at, "expected " + std::to_string(dim) + " entries");
    std::vector<Expression> parsed;
    for (int j = 0; j < dim; ++j)
      parsed.push_back(expression_at(row[static_cast<std::size_t>(j)], dim, row_at + "/" + std::to_string(j)));
    out.push_back(std::move(parsed));
  }
  return out;
}

ChartManifold chart_at(const json& v, const std::string& at) {
  const json& d = require(v, "dim", at);
  if (!d.is_number_integer() || d.get<int>() < 1) throw SpecError(at + "/dim", "expected a positive integer");
  const int dim = d.get<int>();

  ExpressionMatrix metric;
  const json& g = require(v, "metric", at);
  if (g.is_string()) {
    if (g.get<std::string>() != "euclidean") throw SpecError(at + "/metric", "unknown metric '" + g.get<std::string>() + "'");
    metric = identity_metric(dim);
  } else {
    metric = matrix_at(g, dim, at + "/metric");
    for (int i = 0; i < dim; ++i)
      for (int k = i + 1; k < dim; ++k)
        if (!(metric[i][k] == metric[k][i]))
          throw SpecError(at + "/metric/" + std::to_string(k) + "/" + std::to_string(i),
                          "metric is not symmetric (differs from entry " + std::to_string(i) + "/" +
                              std::to_string(k) + ")");
  }

  std::optional<ExpressionMatrix> j;
  if (auto it = v.find("complex_structure"); it != v.end() && !it->is_null()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "standard")
        throw SpecError(at + "/complex_structure", "unknown complex structure '" + it->get<std::string>() + "'");
      if (dim % 2 != 0) throw SpecError(at + "/complex_structure", "needs an even dimension");
      j = standard_complex_structure(dim);
    } else {
      j = matrix_at(*it, dim, at + "/complex_structure");
    }
  }

  try {
    return ChartManifold(dim, std::move(metric), std::move(j));
  } catch (const std::exception& e) {
    throw SpecError(at, e.what());
  }
}

}  // namespace

MapSpec map_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw SpecError("", "map spec must be a JSON object");
  const json& schema = require(doc, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != "slantmap/1")
    throw SpecError("/schema", "unsupported schema (expected \"slantmap/1\")");

  ChartManifold source = chart_at(require(doc, "source", ""), "/source");
  ChartManifold target = chart_at(require(doc, "target", ""), "/target");

  const json& comps = require(doc, "components", "");
  if (!comps.is_array()) throw SpecError("/components", "expected an array");
  if (static_cast<int>(comps.size()) != target.dim())
    throw SpecError("/components", "has " + std::to_string(comps.size()) + " entries but the target has dimension " +
                                       std::to_string(target.dim()));
  std::vector<Expression> components;
  for (std::size_t i = 0; i < comps.size(); ++i)
    components.push_back(expression_at(comps[i], source.dim(), "/components/" + std::to_string(i)));

  std::optional<Box> domain;
  if (auto it = doc.find("domain"); it != doc.end() && !it->is_null()) {
    if (!it->is_array() || static_cast<int>(it->size()) != source.dim())
      throw SpecError("/domain", "expected " + std::to_string(source.dim()) + " intervals");
    Box box;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& iv = (*it)[i];
      const std::string at = "/domain/" + std::to_string(i);
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        throw SpecError(at, "expected [lo, hi]");
      const double lo = iv[0].get<double>(), hi = iv[1].get<double>();
      if (!(lo <= hi)) throw SpecError(at, "empty interval");
      box.bounds.push_back({lo, hi});
    }
    domain = std::move(box);
  }

  try {
    return MapSpec(std::move(source), std::move(target), std::move(components), std::move(domain));
  } catch (const std::invalid_argument& e) {
    throw SpecError("", e.what());
  }
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedSpec load_map_spec(const std::string& id_or_path) {
  constexpr std::string_view prefix = "catalog:";
  if (id_or_path.rfind(prefix, 0) == 0) {
    const std::string id = id_or_path.substr(prefix.size());
    const json doc = catalog_spec(id);
    return LoadedSpec{map_spec_from_json(doc), doc.value("name", id), id_or_path, id_or_path};
  }

  std::ifstream in(id_or_path, std::ios::binary);
  if (!in) throw SpecError("", "cannot open map spec '" + id_or_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw SpecError("", std::string("invalid JSON: ") + e.what());
  }
  std::string name = id_or_path;
  if (auto it = doc.find("name"); doc.is_object() && it != doc.end() && it->is_string()) name = it->get<std::string>();
  return LoadedSpec{map_spec_from_json(doc), std::move(name), id_or_path, "fnv1a64:" + fnv1a64_hex(bytes)};
}

}  // namespace slantmap
