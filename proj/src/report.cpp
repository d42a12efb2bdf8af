#include "phaseportrait/report.hpp"

#include <fstream>
#include <sstream>

#include "phaseportrait/csv.hpp"
#include "phaseportrait/error.hpp"

namespace phaseportrait::report {

namespace {

json header(const char* name) { return json{{"schema", name}, {"version", kSchemaVersion}}; }

json point(const Eigen::Vector2d& p) { return json::array({p.x(), p.y()}); }

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

json to_json(const Crossing& c) {
  return {{"seg_a", c.seg_a}, {"seg_b", c.seg_b}, {"location", point(c.location)},
          {"param_a", c.param_a}, {"param_b", c.param_b}};
}

json to_json(const DegenerateOverlap& o) { return {{"seg_a", o.seg_a}, {"seg_b", o.seg_b}}; }

json to_json(const Loop& loop) {
  json chain = json::array();
  for (const auto& v : loop.vertex_chain) chain.push_back(point(v));
  return {{"anchor", loop.anchor == LoopAnchor::crossing ? "crossing" : "excursion"},
          {"start_crossing", loop.start_crossing ? to_json(*loop.start_crossing) : json(nullptr)},
          {"first_year", loop.first_year},
          {"last_year", loop.last_year},
          {"vertex_chain", chain},
          {"signed_area", loop.signed_area},
          {"orientation", loop.orientation}};
}

json to_json(const YearInterval& iv) { return {{"first", iv.first}, {"last", iv.last}}; }

json to_json(const EroeiModel& m) {
  return {{"year_start", m.year_start()}, {"e_start", m.e_start()}, {"year_end", m.year_end()}, {"e_end", m.e_end()}};
}

json to_json(const EroeiSource& source) {
  if (const auto* m = std::get_if<EroeiModel>(&source)) return {{"kind", "linear-model"}, {"model", to_json(*m)}};
  return {{"kind", "per-year"}, {"years", std::get<Series>(source).size()}};
}

json to_json(const BackgroundFit& fit) {
  return {{"k", fit.k},
          {"k_std_error", fit.k_std_error},
          {"bootstrap_draws", fit.bootstrap_draws},
          {"bootstrap_seed", fit.bootstrap_seed},
          {"support_years", fit.support_years},
          {"residuals", fit.residuals},
          {"rms_relative_residual", fit.rms_relative_residual},
          {"in_reference_band", fit.in_reference_band},
          {"reference_band", json::array({kReferenceBandLow, kReferenceBandHigh})},
          {"eroei", to_json(fit.eroei)}};
}

json to_json(const ProductInvariance& p) {
  return {{"cv_product", p.cv_product}, {"cv_price", p.cv_price}, {"product_more_stable", p.product_more_stable}};
}

json to_json(const LorenzFit<double>& f) {
  return {{"k1", f.k1}, {"k2", f.k2}, {"k3", f.k3},
          {"se1", f.se1}, {"se2", f.se2}, {"se3", f.se3}, {"n_points", f.n_points}};
}

json to_json(const ProductStatistics<double>& s) {
  return {{"mean", s.mean}, {"cv", s.cv ? json(*s.cv) : json(nullptr)}, {"cv_applicable", s.cv.has_value()}};
}

json to_json(const AttractorReport& r) {
  return {{"window_years", json::array({r.first_year, r.last_year})},
          {"mean", r.mean},
          {"min", r.min},
          {"max", r.max},
          {"band_halfwidth", r.band_halfwidth}};
}

json to_json(const ScenarioResult& r) {
  return {{"threshold_price", r.threshold_price},
          {"k", r.k},
          {"crossing_year", r.crossing_year},
          {"crossing_year_rounded", r.crossing_year_rounded},
          {"eroei_at_crossing", r.eroei_at_crossing},
          {"production_at_crossing", r.production_at_crossing},
          {"production_unit", "Mton/yr"},
          {"reference_year", r.reference_year},
          {"years_from_reference", r.years_from_reference},
          {"already_crossed", r.already_crossed}};
}

json crossings_document(const CrossingReport& crossings, const LoopReport& loops,
                        const std::vector<YearInterval>& anomalies, const LoopReport& excursions) {
  json doc = header("crossings");
  json cs = json::array(), os = json::array(), ls = json::array(), as = json::array(), es = json::array();
  for (const auto& c : crossings.crossings) cs.push_back(to_json(c));
  for (const auto& o : crossings.overlaps) os.push_back(to_json(o));
  for (const auto& l : loops.loops) ls.push_back(to_json(l));
  for (const auto& a : anomalies) as.push_back(to_json(a));
  for (const auto& l : excursions.loops) es.push_back(to_json(l));
  json diags = loops.diagnostics;
  for (const auto& d : excursions.diagnostics) diags.push_back(d);
  doc["crossings"] = cs;
  doc["degenerate_overlaps"] = os;
  doc["loops"] = ls;
  doc["anomalies"] = as;
  doc["excursion_loops"] = es;
  doc["diagnostics"] = diags;
  return doc;
}

json fit_document(const BackgroundFit& fit, const ProductInvariance& invariance,
                  const std::vector<YearInterval>& anomalies, const std::vector<int>& violations) {
  json doc = header("background-fit");
  doc["fit"] = to_json(fit);
  doc["product_invariance"] = to_json(invariance);
  json as = json::array();
  for (const auto& a : anomalies) as.push_back(to_json(a));
  doc["anomalies"] = as;
  doc["envelope_violations"] = violations;
  return doc;
}

json lorenz_fit_document(const LorenzFit<double>& fit, const std::string& source, double dt,
                         std::optional<Eigen::Index> reference) {
  json doc = header("lorenz-fit");
  doc["fit"] = to_json(fit);
  doc["source"] = source;
  doc["dt"] = dt;
  doc["reference_index"] = reference ? json(*reference) : json(nullptr);
  return doc;
}

json lorenz_stats_document(const LorenzParams<double>& p, const ProductStatistics<double>& stats, double cv_z) {
  json doc = header("lorenz-stats");
  doc["params"] = {{"sigma", p.sigma}, {"r", p.r}, {"b", p.b}};
  doc["divergence"] = divergence(p);
  doc["product_yz"] = to_json(stats);
  doc["cv_z"] = cv_z;
  return doc;
}

json attractor_document(const AttractorReport& trailing, const AttractorReport& full) {
  json doc = header("attractor");
  doc["trailing"] = to_json(trailing);
  doc["full"] = to_json(full);
  return doc;
}

json scenario_document(const ScenarioResult& r, const EroeiModel& model) {
  json doc = header("scenario");
  doc["result"] = to_json(r);
  doc["eroei_model"] = to_json(model);
  return doc;
}

json error_document(const std::exception& e) {
  json err = {{"message", e.what()}};
  if (const auto* pe = dynamic_cast<const Error*>(&e)) {
    err["module"] = pe->module();
    err["kind"] = std::string(to_string(pe->kind()));
    err["location"] = pe->location();
  } else {
    err["module"] = "cli-report";
    err["kind"] = "internal";
    err["location"] = "";
  }
  json doc = header("error");
  doc["error"] = err;
  return doc;
}

std::string trajectory_csv(const PhaseTrajectory& traj) {
  std::ostringstream os;
  const bool three = traj.dimensionality() == 3;
  os << (three ? "year,x,y,z\n" : "year,x,y\n");
  for (const auto& p : traj.points()) {
    os << p.year << ',' << fmt(p.x) << ',' << fmt(p.y);
    if (three) os << ',' << fmt(*p.z);
    os << '\n';
  }
  return os.str();
}

std::string series_csv(const Series& s, const std::string& value_header) {
  std::ostringstream os;
  os << "year," << value_header << '\n';
  for (const auto& yv : s) os << yv.year << ',' << fmt(yv.value) << '\n';
  return os.str();
}

std::string lorenz_csv(const LorenzTrajectory<double>& traj, double t0, double dt) {
  std::ostringstream os;
  os << "t,x,y,z\n";
  for (Eigen::Index i = 0; i < traj.rows(); ++i)
    os << fmt(t0 + static_cast<double>(i) * dt) << ',' << fmt(traj(i, 0)) << ',' << fmt(traj(i, 1)) << ','
       << fmt(traj(i, 2)) << '\n';
  return os.str();
}

std::string curves_csv(const std::vector<std::pair<double, std::vector<CurveSample>>>& curves) {
  std::ostringstream os;
  os << "k,eroei,price\n";
  for (const auto& [k, samples] : curves)
    for (const auto& s : samples) os << fmt(k) << ',' << fmt(s.eroei) << ',' << fmt(s.price) << '\n';
  return os.str();
}

std::string dataset_csv(const Dataset& dataset) {
  std::ostringstream os;
  os << "year,production_mton,price_2014usd,population,eroei\n";
  for (const auto& r : dataset.records()) {
    os << r.year << ',' << fmt(r.production) << ',' << fmt(r.price) << ','
       << (r.population ? fmt(*r.population) : "") << ',' << (r.eroei ? fmt(*r.eroei) : "") << '\n';
  }
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cli-report", "cannot write file", path.string());
  out << text;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace phaseportrait::report
