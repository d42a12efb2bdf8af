#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace phaseportrait {

inline const std::vector<std::string> kSubcommands = {
    "ingest", "phase2d", "phase3d", "fit-background", "fit-lorenz",
    "simulate-lorenz", "attractor", "scenario", "report-all"};

/// Everything a run depends on. Serializes to a single JSON text; a saved
/// config reproduces the run byte for byte.
struct RunConfig {
  std::string subcommand;
  std::string out_dir = "out";

  // data-model
  std::string data_path;        ///< empty: bundled oil_production_price.csv
  std::string population_path;  ///< empty: bundled world_population.csv
  std::string col_year = "year";
  std::string col_production = "production_mton";
  std::string col_price = "price_2014usd";
  std::string col_population = "population";
  std::string col_deflator;  ///< set together with nominal prices
  std::string col_eroei;     ///< per-year EROEI instead of the linear model
  bool nominal_prices = false;
  int base_year = 2014;

  // phase-geometry
  std::string x_axis = "production";  ///< production | per-capita
  std::optional<int> normalize_year;
  double anomaly_threshold = 0.5;

  // envelope-fit, EROEI model "y0:e0,y1:e1"; empty means the default model
  std::string eroei_anchors;
  std::vector<int> support_years;  ///< empty: lower convex hull
  std::vector<double> k_curves = {300.0, 450.0, 600.0, 750.0};
  int bootstrap_draws = 1000;
  std::uint64_t seed = 20160101;

  // lorenz-lab
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;
  double x0 = 1.0, y0 = 1.0, z0 = 1.0;
  double dt = 0.005;
  double t_end = 25.0;
  double t_start = 0.0;  ///< fit-lorenz on a trajectory CSV drops samples before this time
  std::string lorenz_input;  ///< fit-lorenz: trajectory CSV; empty uses the oil data
  std::optional<long> lorenz_reference;  ///< oil fit reference sample; central when empty
  bool lorenz_normalize = true;

  // scenario
  std::size_t attractor_window = 25;
  double attractor_reference = 0.59;
  std::string scenario_k = "fit";  ///< "fit" or a number
  double threshold = 100.0;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& doc);

/// Bundled data directory: $PHASEPORTRAIT_DATA if set, else the repo copy.
std::filesystem::path data_directory();

/// Executes the subcommand, writing artifacts under config.out_dir and a
/// text summary to `summary`. Throws phaseportrait::Error on failure.
void run(const RunConfig& config, std::ostream& summary);

/// Command-line entry point: parses arguments, runs, and maps failures to a
/// JSON error document on `err` and a nonzero status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phaseportrait
