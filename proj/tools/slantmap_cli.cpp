#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slantmap/catalog.hpp"
#include "slantmap/report.hpp"
#include "slantmap/spec_io.hpp"

using namespace slantmap;

namespace {

struct RunFlags {
  std::string map;
  AnalysisOptions options;
  std::string out;
  bool pretty = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--map", f.map, "catalog:<id>[(params)] or path to a slantmap/1 JSON file")->required();
  cmd->add_option("--samples", f.options.points, "sample points in the domain box")->check(CLI::PositiveNumber);
  cmd->add_option("--dirs", f.options.dirs, "random directions per point")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.options.seed, "sampling seed");
  cmd->add_option("--tol", f.options.tol.check, "residual tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--angle-tol", f.options.tol.angle, "slant angle tolerance (radians)")->check(CLI::PositiveNumber);
  cmd->add_option("--rank-tol", f.options.tol.rank, "relative singular value cutoff")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "write the report here instead of stdout");
  cmd->add_flag("--pretty", f.pretty, "indent the JSON output");
}

int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

const CheckResult* find_check(const Report& r, const std::string& name) {
  if (const CheckResult* c = r.check(name)) return c;
  for (const auto& c : r.checks)
    if (const CheckResult* p = c.part(name)) return p;
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical analysis of slant Riemannian maps between coordinate charts"};
  app.require_subcommand(1);

  RunFlags analyze_flags;
  CLI::App* analyze = app.add_subcommand("analyze", "run every applicable check and print a JSON report");
  add_run_flags(analyze, analyze_flags);

  RunFlags check_flags;
  std::string check_name;
  CLI::App* check = app.add_subcommand("check", "run the analysis and print a single check");
  check->add_option("name", check_name, "check name, e.g. phwc or totally_geodesic")->required();
  add_run_flags(check, check_flags);

  CLI::App* catalog = app.add_subcommand("catalog", "list built-in maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (catalog->parsed()) {
    for (const auto& e : catalog_entries()) {
      std::string id = e.id;
      if (!e.params.empty()) {
        id += "(";
        for (std::size_t i = 0; i < e.params.size(); ++i)
          id += (i ? "," : "") + e.params[i].first + "=" + format_literal(e.params[i].second);
        id += ")";
      }
      std::printf("catalog:%-40s %s\n", id.c_str(), e.summary.c_str());
    }
    return 0;
  }

  RunFlags& flags = analyze->parsed() ? analyze_flags : check_flags;
  LoadedSpec spec = [&]() -> LoadedSpec {
    try {
      return load_map_spec(flags.map);
    } catch (const SpecError& e) {
      std::cerr << "error: " << e.what() << "\n";
      std::exit(2);
    }
  }();

  const Report report = run_analysis(spec.map, flags.options, spec.id, spec.name, spec.provenance);
  if (!report.error.empty()) std::cerr << "error: " << report.error << "\n";

  if (analyze->parsed()) {
    if (emit(write_json(to_json(report), flags.pretty), flags.out) != 0) return 2;
    return report.exit_code();
  }

  const CheckResult* c = find_check(report, check_name);
  if (!c) {
    std::cerr << "error: no check named '" << check_name << "'"
              << (report.error.empty() ? "" : " (analysis stopped early)") << "\n";
    return 2;
  }
  nlohmann::ordered_json doc;
  doc["map"] = spec.id;
  doc["check"] = to_json(*c);
  if (emit(write_json(doc, flags.pretty), flags.out) != 0) return 2;
  return c->failed() ? 1 : 0;
}
