#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "slantmap/catalog.hpp"
#include "slantmap/report.hpp"
#include "slantmap/spec_io.hpp"

using namespace slantmap;
using nlohmann::json;

namespace {

std::string pointer_of(const json& doc) {
  try {
    map_spec_from_json(doc);
  } catch (const SpecError& e) {
    return e.pointer();
  }
  return "<no error>";
}

json minimal_doc() {
  return json::parse(R"({
    "schema": "slantmap/1",
    "name": "plane",
    "source": {"dim": 2, "metric": "euclidean"},
    "target": {"dim": 4, "metric": "euclidean", "complex_structure": "standard"},
    "components": ["x1", "0", "x2", "0"]
  })");
}

AnalysisOptions quick() {
  AnalysisOptions o;
  o.points = 6;
  o.dirs = 3;
  return o;
}

Report analyze(const std::string& id, const AnalysisOptions& o = quick()) {
  const LoadedSpec s = load_map_spec(id);
  return run_analysis(s.map, o, s.id, s.name, s.provenance);
}

}  // namespace

TEST_CASE("literal formatting round-trips") {
  for (double v : {0.3, 1.0 / 3.0, -2.5, 1e-300, 0.7853981633974483, 6.02214076e23}) {
    const std::string s = format_literal(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_literal(0.5) == "0.5");
  CHECK(format_literal(2.0) == "2");
}

TEST_CASE("catalog ids and parameters") {
  CHECK(catalog_entries().size() >= 9);
  for (const auto& e : catalog_entries()) CHECK_NOTHROW(map_spec_from_json(catalog_spec(e.id)));
  CHECK(catalog_spec("compose_slant(0.3)") == catalog_spec("compose_slant(alpha=0.3)"));
  CHECK(catalog_spec("compose_slant") == catalog_spec("compose_slant(0.7853981633974483)"));
  CHECK_THROWS_AS(catalog_spec("bogus"), SpecError);
  CHECK_THROWS_AS(catalog_spec("compose_slant(beta=1)"), SpecError);
  CHECK_THROWS_AS(catalog_spec("compose_slant(abc)"), SpecError);
  CHECK_THROWS_AS(catalog_spec("compose_slant(0.3"), SpecError);
  CHECK_THROWS_AS(catalog_spec("example4(1)"), SpecError);
}

TEST_CASE("spec documents are validated with JSON pointers") {
  CHECK(pointer_of(minimal_doc()) == "<no error>");

  json d = minimal_doc();
  d["schema"] = "slantmap/2";
  CHECK(pointer_of(d) == "/schema");

  d = minimal_doc();
  d["components"][1] = "x3 + 1";
  CHECK(pointer_of(d) == "/components/1");

  d = minimal_doc();
  d["components"].erase(3);
  CHECK(pointer_of(d) == "/components");

  d = minimal_doc();
  d["target"]["complex_structure"] = "weird";
  CHECK(pointer_of(d) == "/target/complex_structure");

  d = minimal_doc();
  d["source"]["metric"] = json::parse(R"([["1", "x1"], ["0", "1"]])");
  CHECK(pointer_of(d) == "/source/metric/1/0");

  d = minimal_doc();
  d["source"]["metric"] = json::parse(R"([["1", "0"], ["0", "exp("]])");
  CHECK(pointer_of(d) == "/source/metric/1/1");

  d = minimal_doc();
  d["domain"] = json::parse("[[0, 1]]");
  CHECK(pointer_of(d) == "/domain");

  d = minimal_doc();
  d["domain"] = json::parse("[[0, 1], [2, 1]]");
  CHECK(pointer_of(d).rfind("/domain/1", 0) == 0);

  d = minimal_doc();
  d["target"]["dim"] = 3;
  d["target"]["complex_structure"] = "standard";
  d["components"] = json::parse(R"(["x1", "x2", "0"])");
  CHECK(pointer_of(d).rfind("/target", 0) == 0);

  d = minimal_doc();
  d["components"][0] = 2.5;
  CHECK(pointer_of(d) == "<no error>");
}

TEST_CASE("file specs carry a content hash as provenance") {
  const auto path = std::filesystem::temp_directory_path() / "slantmap_test_spec.json";
  const std::string text = minimal_doc().dump();
  {
    std::ofstream out(path);
    out << text;
  }
  const LoadedSpec s = load_map_spec(path.string());
  CHECK(s.name == "plane");
  CHECK(s.provenance == "fnv1a64:" + fnv1a64_hex(text));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(load_map_spec((std::filesystem::temp_directory_path() / "missing_spec.json").string()),
                  SpecError);
  // FNV-1a 64-bit test vectors
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("json writer") {
  nlohmann::ordered_json doc;
  doc["a"] = 0.1;
  doc["b"] = std::numeric_limits<double>::quiet_NaN();
  doc["c"] = std::numeric_limits<double>::infinity();
  doc["d"] = json::array({1, 2});
  doc["e"] = "x\"y";
  CHECK(write_json(doc, false) == R"({"a":0.10000000000000001,"b":null,"c":null,"d":[1,2],"e":"x\"y"})" "\n");
  const std::string pretty = write_json(doc, true);
  CHECK(json::parse(pretty)["a"] == 0.1);
  CHECK(pretty.find("[1, 2]") != std::string::npos);
}

TEST_CASE("report exit codes and ordering") {
  const Report ok = analyze("catalog:example4");
  CHECK(ok.error.empty());
  CHECK(ok.exit_code() == 0);
  const std::vector<std::string> first = {"almost_hermitian", "kahler", "riemannian_map", "sff_range_perp",
                                          "tension_split", "harmonic", "minimal_fibers", "slant"};
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(ok.checks[i].name == first[i]);
  CHECK(ok.checks.back().name == "totally_geodesic");

  CHECK(analyze("catalog:nonslant").exit_code() == 1);
  CHECK(analyze("catalog:anti_invariant").exit_code() == 0);

  // Metric not positive definite inside the domain: evaluation error.
  json d = minimal_doc();
  d["source"]["metric"] = json::parse(R"([["x1", "0"], ["0", "1"]])");
  const Report bad = run_analysis(map_spec_from_json(d), quick());
  CHECK_FALSE(bad.error.empty());
  CHECK(bad.exit_code() == 2);
  CHECK(to_json(bad)["error"].is_string());
}

TEST_CASE("reports are byte-identical across runs and seeds change no verdict") {
  for (const char* id : {"catalog:example4", "catalog:curved_target", "catalog:warped_fiber", "catalog:nonslant"}) {
    const std::string a = write_json(to_json(analyze(id)), true);
    const std::string b = write_json(to_json(analyze(id)), true);
    CHECK(a == b);

    AnalysisOptions other = quick();
    other.seed = 1234;
    const Report r1 = analyze(id);
    const Report r2 = analyze(id, other);
    REQUIRE(r1.checks.size() == r2.checks.size());
    for (std::size_t i = 0; i < r1.checks.size(); ++i) CHECK_MESSAGE(r1.checks[i].status == r2.checks[i].status, id);
  }
}

TEST_CASE("report json layout") {
  const json j = json::parse(write_json(to_json(analyze("catalog:curved_target")), false));
  CHECK(j["schema"] == "slantmap-report/1");
  CHECK(j["map"]["id"] == "catalog:curved_target");
  CHECK(j["slant"]["classification"] == "proper_slant");
  CHECK(j["samples"].size() == 6);
  CHECK(j["summary"]["exit_code"] == 1);
  bool saw_skip_reason = false;
  for (const auto& c : j["checks"])
    if (c["status"] == "skipped") saw_skip_reason = saw_skip_reason || c.contains("reason");
  CHECK(saw_skip_reason);
}
