#include "slantmap/catalog.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "slantmap/spec_io.hpp"

namespace slantmap {

namespace {

using nlohmann::json;

constexpr double kPi = 3.141592653589793;

using Params = std::map<std::string, double>;

json euclidean_chart(int dim) { return json{{"dim", dim}, {"metric", "euclidean"}}; }

json hermitian_chart(int dim) {
  return json{{"dim", dim}, {"metric", "euclidean"}, {"complex_structure", "standard"}};
}

json document(const std::string& name, json source, json target, std::vector<std::string> components) {
  return json{{"schema", "slantmap/1"},
              {"name", name},
              {"source", std::move(source)},
              {"target", std::move(target)},
              {"components", std::move(components)}};
}

// v * x<k>, with the coefficient spelled out as a literal.
std::string scaled(double v, const std::string& x) { return "(" + format_literal(v) + ") * " + x; }

json identity2(const Params&) { return document("identity2", euclidean_chart(2), hermitian_chart(2), {"x1", "x2"}); }

json invariant(const Params&) {
  return document("invariant", euclidean_chart(3), hermitian_chart(4), {"x1", "x2", "0", "0"});
}

json anti_invariant(const Params&) {
  return document("anti_invariant", euclidean_chart(2), hermitian_chart(4), {"x1", "0", "x2", "0"});
}

json example4(const Params&) {
  return document("example4", euclidean_chart(4), hermitian_chart(4),
                  {"x1", "(x2 + x3) / sqrt(3)", "(x2 + x3) / sqrt(6)", "0"});
}

json slant_plane(const Params& p) {
  const double a = p.at("alpha");
  return document("slant_plane", euclidean_chart(2), hermitian_chart(4),
                  {"x1", scaled(std::cos(a), "x2"), scaled(std::sin(a), "x2"), "0"});
}

json compose_slant(const Params& p) {
  const double a = p.at("alpha");
  return document("compose_slant", euclidean_chart(3), hermitian_chart(4),
                  {"x1", scaled(std::cos(a), "x2"), scaled(std::sin(a), "x2"), "0"});
}

json curved_target(const Params& p) {
  const double b = p.at("beta");
  json target = hermitian_chart(4);
  target["metric"] = json::array({json::array({"exp(2 * x1)", "0", "0", "0"}),
                                  json::array({"0", "exp(2 * x1)", "0", "0"}),
                                  json::array({"0", "0", "1", "0"}),
                                  json::array({"0", "0", "0", "1"})});
  return document("curved_target", euclidean_chart(2), std::move(target),
                  {"0", scaled(std::cos(b), "x1"), scaled(std::sin(b), "x1"), "x2"});
}

json warped_fiber(const Params& p) {
  const double a = p.at("alpha");
  json source = euclidean_chart(3);
  source["metric"] = json::array({json::array({"1", "0", "0"}),
                                  json::array({"0", "1 + pow(x1, 2) * exp(2 * x1)", "x1 * exp(2 * x1)"}),
                                  json::array({"0", "x1 * exp(2 * x1)", "exp(2 * x1)"})});
  return document("warped_fiber", std::move(source), hermitian_chart(4),
                  {"x1", scaled(std::cos(a), "x2"), scaled(std::sin(a), "x2"), "0"});
}

json nonslant(const Params&) {
  return document("nonslant", euclidean_chart(2), hermitian_chart(4), {"x1", "cos(x2)", "sin(x2)", "0"});
}

struct Builder {
  CatalogEntry entry;
  std::function<json(const Params&)> build;
};

const std::vector<Builder>& builders() {
  static const std::vector<Builder> all = {
      {{"identity2", "identity of R^2 into Hermitian R^2; invariant, theta = 0", {}}, identity2},
      {{"invariant", "(x,y,z) -> (x,y,0,0) from R^3 to R^4; invariant, theta = 0", {}}, invariant},
      {{"anti_invariant", "(x,y) -> (x,0,y,0) from R^2 to R^4; anti-invariant, theta = pi/2", {}}, anti_invariant},
      {{"example4", "(x1, (x2+x3)/sqrt(3), (x2+x3)/sqrt(6), 0) on R^4; theta = arccos(sqrt(2/3))", {}}, example4},
      {{"slant_plane", "(u,v) -> (u, v cos(alpha), v sin(alpha), 0); slant immersion, theta = alpha",
        {{"alpha", kPi / 4}}},
       slant_plane},
      {{"compose_slant", "projection R^3 -> R^2 followed by slant_plane(alpha); theta = alpha, minimal fibers",
        {{"alpha", kPi / 4}}},
       compose_slant},
      {{"curved_target", "R^2 -> R^4 with metric diag(e^{2y1}, e^{2y1}, 1, 1); theta = pi/2 - beta, omega not parallel",
        {{"beta", kPi / 6}}},
       curved_target},
      {{"warped_fiber", "compose_slant with a source metric warped along the fibers; not harmonic",
        {{"alpha", kPi / 4}}},
       warped_fiber},
      {{"nonslant", "(x1, cos x2, sin x2, 0) from R^2 to R^4; isometric but the angle varies", {}}, nonslant},
  };
  return all;
}

double parse_number(std::string_view text, std::string_view id) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw SpecError("", "catalog:" + std::string(id) + ": bad parameter value '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::string format_literal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> out;
    for (const auto& b : builders()) out.push_back(b.entry);
    return out;
  }();
  return entries;
}

json catalog_spec(std::string_view id) {
  std::string_view name = id;
  std::string_view args;
  if (const auto open = id.find('('); open != std::string_view::npos) {
    if (id.back() != ')') throw SpecError("", "catalog:" + std::string(id) + ": missing ')'");
    name = id.substr(0, open);
    args = id.substr(open + 1, id.size() - open - 2);
  }

  for (const auto& b : builders()) {
    if (b.entry.id != name) continue;
    Params params(b.entry.params.begin(), b.entry.params.end());
    std::size_t positional = 0;
    while (!args.empty()) {
      const auto comma = args.find(',');
      std::string_view item = args.substr(0, comma);
      args = comma == std::string_view::npos ? std::string_view{} : args.substr(comma + 1);
      if (const auto eq = item.find('='); eq != std::string_view::npos) {
        std::string key(item.substr(0, eq));
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        if (!params.count(key))
          throw SpecError("", "catalog:" + std::string(name) + " has no parameter '" + key + "'");
        params[key] = parse_number(item.substr(eq + 1), id);
      } else {
        if (positional >= b.entry.params.size())
          throw SpecError("", "catalog:" + std::string(name) + ": too many parameters");
        params[b.entry.params[positional++].first] = parse_number(item, id);
      }
    }
    return b.build(params);
  }
  throw SpecError("", "unknown catalog entry '" + std::string(name) + "'");
}

}  // namespace slantmap
