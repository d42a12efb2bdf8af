#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "phaseportrait/cli.hpp"
#include "phaseportrait/error.hpp"
#include "phaseportrait/report.hpp"
#include "phaseportrait/svg.hpp"
#include "schema_check.hpp"
#include "test_support.hpp"

using namespace phaseportrait;
using nlohmann::json;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

struct Result {
  int status = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "phaseportrait");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

testing::SchemaCheck schema(const std::string& name) {
  return testing::SchemaCheck::load(std::filesystem::path(PHASEPORTRAIT_SCHEMA_DIR) / (name + ".schema.json"));
}

void check_against(const std::string& schema_name, const json& doc) {
  auto errs = schema(schema_name).errors(doc);
  for (const auto& e : errs) INFO(e);
  CHECK(errs.empty());
}

PlotSeries three_points() {
  PlotSeries s;
  s.name = "demo";
  s.source_op = "test";
  s.points = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}};
  s.labels = {2000, 2001, 2002};
  return s;
}

}  // namespace

TEST_CASE("three-point timeline") {
  PlotSpec spec;
  spec.title = "demo";
  auto svg = render_plot(spec, {three_points()});
  CHECK(count(svg, "class=\"marker\"") == 3);
  CHECK(count(svg, "class=\"timeline\"") == 1);
  // Two segments: a polyline through three coordinate pairs.
  auto pos = svg.find("class=\"timeline\"");
  auto pts = svg.find("points=\"", pos) + 8;
  auto end = svg.find('"', pts);
  CHECK(count(svg.substr(pts, end - pts), ",") == 3);
  CHECK(svg.find("source=\"test\"") != std::string::npos);
  CHECK(count(svg, "class=\"pointlabel\"") == 3);
}

TEST_CASE("rendering is byte-identical on repeat") {
  PlotSpec spec;
  spec.kind = PlotKind::phase3d_projection;
  auto s = three_points();
  s.z = {15.0, 12.5, 10.0};
  CHECK(render_plot(spec, {s}) == render_plot(spec, {s}));
  CHECK(render_plot(spec, {s}).find("plot1") != std::string::npos);
  s.z.pop_back();
  CHECK_THROWS_AS(render_plot(spec, {s}), Error);
}

TEST_CASE("empty data is refused") {
  CHECK_THROWS_AS(render_plot({}, {}), Error);
  PlotSeries empty;
  CHECK_THROWS_AS(render_plot({}, {empty}), Error);
}

TEST_CASE("horizontal guide sits at its data value") {
  PlotSpec spec;
  spec.kind = PlotKind::per_capita;
  spec.y_range = std::pair{0.0, 1.0};
  spec.guides.push_back({0.59, "0.59 t/person"});
  auto svg = render_plot(spec, {three_points()});
  // Plot area spans y = 50..480 for data 1..0.
  CHECK(svg.find("<line class=\"guide\" x1=\"80.00\" y1=\"226.30\" x2=\"690.00\" y2=\"226.30\"/>") !=
        std::string::npos);
  CHECK(svg.find("0.59 t/person") != std::string::npos);
}

TEST_CASE("text is escaped") {
  PlotSpec spec;
  spec.title = "a<b & \"c\"";
  auto svg = render_plot(spec, {three_points()});
  CHECK(svg.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.subcommand = "phase2d";
  c.normalize_year = 1990;
  c.support_years = {1965, 1998, 2014};
  c.seed = 42;
  c.lorenz_reference = 3;
  auto j = to_json(c);
  check_against("config", j);
  CHECK(to_json(config_from_json(j)) == j);
  CHECK_THROWS_AS(config_from_json(json{{"seed", "many"}}), Error);
}

TEST_CASE("unknown subcommand is a usage error") {
  auto r = run_cli({"bogus"});
  CHECK(r.status == 2);
  auto doc = json::parse(r.err);
  check_against("error", doc);
  CHECK(doc["error"]["kind"] == "usage");
  CHECK(doc["error"]["location"] == "bogus");
  CHECK(run_cli({}).status == 2);
}

TEST_CASE("missing input file is reported as an io error") {
  testing::ScratchDir dir;
  auto r = run_cli({"ingest", "-o", dir.path().string(), "--data", (dir.path() / "nope.csv").string()});
  CHECK(r.status == 1);
  auto doc = json::parse(r.err);
  check_against("error", doc);
  CHECK(doc["error"]["kind"] == "io");
}

TEST_CASE("bad EROEI anchors are a configuration error") {
  testing::ScratchDir dir;
  auto r = run_cli({"fit-background", "-o", dir.path().string(), "--eroei-anchors", "1965-15"});
  CHECK(r.status == 1);
  CHECK(json::parse(r.err)["error"]["kind"] == "configuration");
}

TEST_CASE("report-all artifacts conform to their schemas") {
  testing::ScratchDir dir;
  auto r = run_cli({"report-all", "-o", dir.path().string(), "--bootstrap-draws", "100"});
  INFO(r.err);
  REQUIRE(r.status == 0);
  const std::vector<std::pair<std::string, std::string>> docs = {
      {"crossings.json", "crossings"},      {"phase3d_loops.json", "crossings"},
      {"fit.json", "background-fit"},       {"lorenz_fit.json", "lorenz-fit"},
      {"lorenz_stats.json", "lorenz-stats"}, {"attractor.json", "attractor"},
      {"scenario.json", "scenario"},        {"config.json", "config"}};
  for (const auto& [file, name] : docs) {
    INFO(file);
    auto doc = json::parse(testing::slurp(dir.path() / file));
    check_against(name, doc);
    if (name != "config") CHECK(doc["schema"] == name);
  }
  for (const char* svg : {"phase2d.svg", "phase3d.svg", "background.svg", "lorenz.svg", "per_capita.svg"}) {
    INFO(svg);
    CHECK(testing::slurp(dir.path() / svg).rfind("<?xml", 0) == 0);
  }
  CHECK(testing::slurp(dir.path() / "trajectory.csv").rfind("year,x,y\n", 0) == 0);
  CHECK(testing::slurp(dir.path() / "trajectory3d.csv").rfind("year,x,y,z\n", 0) == 0);
  CHECK(testing::slurp(dir.path() / "lorenz.csv").rfind("t,x,y,z\n", 0) == 0);
}

TEST_CASE("a saved config reproduces the run") {
  testing::ScratchDir dir;
  const auto cfg = (dir.path() / "run.json").string();
  const auto a = (dir.path() / "a").string();
  const auto b = (dir.path() / "b").string();
  REQUIRE(run_cli({"fit-background", "-o", a, "--k-curves", "200,400", "--save-config", cfg}).status == 0);
  REQUIRE(run_cli({"fit-background", "-o", a, "--k-curves", "200,400"}).status == 0);
  REQUIRE(run_cli({"--config", cfg, "fit-background", "-o", b}).status == 0);
  for (const char* f : {"fit.json", "curves.csv", "background.svg"}) {
    INFO(f);
    CHECK(testing::slurp(std::filesystem::path(a) / f) == testing::slurp(std::filesystem::path(b) / f));
  }
  CHECK(testing::slurp(std::filesystem::path(b) / "curves.csv").find("\n400,") != std::string::npos);
}

TEST_CASE("fit-lorenz on a trajectory file") {
  testing::ScratchDir dir;
  REQUIRE(run_cli({"simulate-lorenz", "-o", dir.path().string(), "--t-end", "25"}).status == 0);
  auto r = run_cli({"fit-lorenz", "-o", dir.path().string(), "--input", (dir.path() / "lorenz.csv").string(),
                    "--t-start", "5", "--normalize-lorenz", "false"});
  INFO(r.err);
  REQUIRE(r.status == 0);
  auto doc = json::parse(testing::slurp(dir.path() / "lorenz_fit.json"));
  CHECK(doc["fit"]["k1"].get<double>() == doctest::Approx(10.0).epsilon(0.05));
  CHECK(doc["fit"]["k2"].get<double>() == doctest::Approx(28.0).epsilon(0.05));
  CHECK(doc["fit"]["k3"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(0.05));
}

TEST_CASE("error document for a foreign exception") {
  auto doc = report::error_document(std::runtime_error("boom"));
  check_against("error", doc);
  CHECK(doc["error"]["kind"] == "internal");
}
