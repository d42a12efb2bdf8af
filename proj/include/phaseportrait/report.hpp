#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "phaseportrait/data_model.hpp"
#include "phaseportrait/envelope_fit.hpp"
#include "phaseportrait/lorenz.hpp"
#include "phaseportrait/phase_geometry.hpp"
#include "phaseportrait/scenario.hpp"

namespace phaseportrait::report {

using nlohmann::json;

/// Version tag written into every JSON document; matches schemas/<name>.schema.json.
inline constexpr const char* kSchemaVersion = "1";

json to_json(const Crossing& c);
json to_json(const DegenerateOverlap& o);
json to_json(const Loop& loop);
json to_json(const YearInterval& iv);
json to_json(const EroeiModel& model);
json to_json(const EroeiSource& source);
json to_json(const BackgroundFit& fit);
json to_json(const ProductInvariance& p);
json to_json(const LorenzFit<double>& fit);
json to_json(const ProductStatistics<double>& stats);
json to_json(const AttractorReport& r);
json to_json(const ScenarioResult& r);

/// Documents with a "schema" header: {"schema": "<name>", "version": "1", ...}.
json crossings_document(const CrossingReport& crossings, const LoopReport& loops,
                        const std::vector<YearInterval>& anomalies, const LoopReport& excursions);
json fit_document(const BackgroundFit& fit, const ProductInvariance& invariance,
                  const std::vector<YearInterval>& anomalies, const std::vector<int>& violations);
json lorenz_fit_document(const LorenzFit<double>& fit, const std::string& source, double dt,
                         std::optional<Eigen::Index> reference);
json lorenz_stats_document(const LorenzParams<double>& params, const ProductStatistics<double>& stats,
                           double cv_z);
json attractor_document(const AttractorReport& trailing, const AttractorReport& full);
json scenario_document(const ScenarioResult& r, const EroeiModel& model);
json error_document(const std::exception& e);

std::string trajectory_csv(const PhaseTrajectory& traj);
std::string series_csv(const Series& s, const std::string& value_header);
std::string lorenz_csv(const LorenzTrajectory<double>& traj, double t0, double dt);
std::string curves_csv(const std::vector<std::pair<double, std::vector<CurveSample>>>& curves);
std::string dataset_csv(const Dataset& dataset);

/// Writes `text` exactly (binary mode, no newline translation).
void write_file(const std::filesystem::path& path, const std::string& text);
std::string dump(const json& doc);

}  // namespace phaseportrait::report
