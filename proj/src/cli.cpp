#include "phaseportrait/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "phaseportrait/csv.hpp"
#include "phaseportrait/data_model.hpp"
#include "phaseportrait/envelope_fit.hpp"
#include "phaseportrait/error.hpp"
#include "phaseportrait/lorenz.hpp"
#include "phaseportrait/lorenz_oil.hpp"
#include "phaseportrait/phase_geometry.hpp"
#include "phaseportrait/report.hpp"
#include "phaseportrait/scenario.hpp"
#include "phaseportrait/svg.hpp"

namespace phaseportrait {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const RunConfig& c) {
  return {
      {"subcommand", c.subcommand},
      {"out_dir", c.out_dir},
      {"data_path", c.data_path},
      {"population_path", c.population_path},
      {"col_year", c.col_year},
      {"col_production", c.col_production},
      {"col_price", c.col_price},
      {"col_population", c.col_population},
      {"col_deflator", c.col_deflator},
      {"col_eroei", c.col_eroei},
      {"nominal_prices", c.nominal_prices},
      {"base_year", c.base_year},
      {"x_axis", c.x_axis},
      {"normalize_year", c.normalize_year ? json(*c.normalize_year) : json(nullptr)},
      {"anomaly_threshold", c.anomaly_threshold},
      {"eroei_anchors", c.eroei_anchors},
      {"support_years", c.support_years},
      {"k_curves", c.k_curves},
      {"bootstrap_draws", c.bootstrap_draws},
      {"seed", c.seed},
      {"sigma", c.sigma},
      {"r", c.r},
      {"b", c.b},
      {"x0", c.x0},
      {"y0", c.y0},
      {"z0", c.z0},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"t_start", c.t_start},
      {"lorenz_input", c.lorenz_input},
      {"lorenz_reference", c.lorenz_reference ? json(*c.lorenz_reference) : json(nullptr)},
      {"lorenz_normalize", c.lorenz_normalize},
      {"attractor_window", c.attractor_window},
      {"attractor_reference", c.attractor_reference},
      {"scenario_k", c.scenario_k},
      {"threshold", c.threshold},
  };
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (doc.contains(key) && !doc.at(key).is_null()) doc.at(key).get_to(field);
  };
  try {
    get("subcommand", c.subcommand);
    get("out_dir", c.out_dir);
    get("data_path", c.data_path);
    get("population_path", c.population_path);
    get("col_year", c.col_year);
    get("col_production", c.col_production);
    get("col_price", c.col_price);
    get("col_population", c.col_population);
    get("col_deflator", c.col_deflator);
    get("col_eroei", c.col_eroei);
    get("nominal_prices", c.nominal_prices);
    get("base_year", c.base_year);
    get("x_axis", c.x_axis);
    if (doc.contains("normalize_year") && !doc["normalize_year"].is_null())
      c.normalize_year = doc["normalize_year"].get<int>();
    get("anomaly_threshold", c.anomaly_threshold);
    get("eroei_anchors", c.eroei_anchors);
    get("support_years", c.support_years);
    get("k_curves", c.k_curves);
    get("bootstrap_draws", c.bootstrap_draws);
    get("seed", c.seed);
    get("sigma", c.sigma);
    get("r", c.r);
    get("b", c.b);
    get("x0", c.x0);
    get("y0", c.y0);
    get("z0", c.z0);
    get("dt", c.dt);
    get("t_end", c.t_end);
    get("t_start", c.t_start);
    get("lorenz_input", c.lorenz_input);
    if (doc.contains("lorenz_reference") && !doc["lorenz_reference"].is_null())
      c.lorenz_reference = doc["lorenz_reference"].get<long>();
    get("lorenz_normalize", c.lorenz_normalize);
    get("attractor_window", c.attractor_window);
    get("attractor_reference", c.attractor_reference);
    get("scenario_k", c.scenario_k);
    get("threshold", c.threshold);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::configuration, "cli-report", std::string("bad config value: ") + e.what());
  }
  return c;
}

fs::path data_directory() {
  if (const char* env = std::getenv("PHASEPORTRAIT_DATA"); env && *env) return env;
  return PHASEPORTRAIT_DATA_DIR;
}

namespace {

constexpr const char* kModule = "cli-report";

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string sig4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

EroeiModel parse_anchors(const std::string& text) {
  // y0:e0,y1:e1
  auto fail = [&] {
    throw Error(ErrorKind::configuration, kModule, "EROEI anchors must look like y0:e0,y1:e1", text);
  };
  auto comma = text.find(',');
  if (comma == std::string::npos) fail();
  auto parse_pair = [&](const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) fail();
    auto y = csv::parse_double(s.substr(0, colon));
    auto e = csv::parse_double(s.substr(colon + 1));
    if (!y || !e) fail();
    return std::pair{*y, *e};
  };
  auto [y0, e0] = parse_pair(text.substr(0, comma));
  auto [y1, e1] = parse_pair(text.substr(comma + 1));
  return EroeiModel(y0, e0, y1, e1);
}

struct Context {
  const RunConfig& config;
  Dataset dataset;
  std::optional<EroeiModel> model;  ///< set unless a per-year EROEI column is used
  EroeiSource eroei;
  fs::path out;
  std::ostream& summary;

  void write(const std::string& name, const std::string& text) const {
    report::write_file(out / name, text);
    summary << "  wrote " << name << "\n";
  }
};

Dataset load_configured_dataset(const RunConfig& c) {
  const fs::path data = c.data_path.empty() ? data_directory() / "oil_production_price.csv" : fs::path(c.data_path);
  ColumnMapping mapping;
  mapping.year = c.col_year;
  mapping.production = c.col_production;
  mapping.price = c.col_price;
  mapping.eroei = c.col_eroei;
  mapping.deflator = c.col_deflator;
  mapping.base_year = c.base_year;
  mapping.price_mode = c.nominal_prices ? PriceMode::nominal : PriceMode::deflated;

  const auto header = csv::read_file(data).header;
  const bool inline_population = std::find(header.begin(), header.end(), c.col_population) != header.end();
  if (inline_population) mapping.population = c.col_population;
  Dataset ds = load_dataset(data, mapping);
  if (inline_population) return ds;

  const fs::path pop = c.population_path.empty() ? data_directory() / "world_population.csv" : fs::path(c.population_path);
  if (!fs::exists(pop)) {
    if (!c.population_path.empty())
      throw Error(ErrorKind::io, "data-model", "population file not found", pop.string());
    return ds;
  }
  return join_population(ds, load_series(pop, c.col_year, c.col_population));
}

Context make_context(const RunConfig& c, std::ostream& summary) {
  Dataset ds = load_configured_dataset(c);
  std::optional<EroeiModel> model;
  EroeiSource source = EroeiModel::default_for(ds);
  if (!c.col_eroei.empty()) {
    Series e;
    for (const auto& r : ds.records()) e.push_back({r.year, *r.eroei});
    source = e;
  } else {
    model = c.eroei_anchors.empty() ? EroeiModel::default_for(ds) : parse_anchors(c.eroei_anchors);
    source = *model;
  }
  return Context{c, std::move(ds), model, source, fs::path(c.out_dir), summary};
}

SupportMode support_mode(const RunConfig& c) {
  if (c.support_years.empty()) return AutoSupport{};
  return c.support_years;
}

BackgroundFit run_fit(const Context& ctx) {
  auto support = select_support(ctx.dataset, support_mode(ctx.config));
  return fit_background(ctx.dataset, ctx.eroei, support, {ctx.config.bootstrap_draws, ctx.config.seed});
}

PhaseTrajectory raw_trajectory(const Context& ctx, ZAxis z) {
  AxisSpec axes;
  axes.x = ctx.config.x_axis == "per-capita" ? XAxis::per_capita_production : XAxis::production;
  axes.z = z;
  if (z == ZAxis::eroei_model && !ctx.model) axes.z = ZAxis::eroei_per_year;
  axes.model = ctx.model;
  return build_trajectory(ctx.dataset, axes);
}

std::string x_label(const RunConfig& c) {
  return c.x_axis == "per-capita" ? "Oil production per capita (t/person)" : "Oil production (Mton)";
}

PlotSeries timeline_series(const PhaseTrajectory& traj, const std::string& source) {
  PlotSeries s;
  s.name = "timeline";
  s.source_op = source;
  for (const auto& p : traj.points()) {
    s.points.emplace_back(p.x, p.y);
    if (p.z) s.z.push_back(*p.z);
    s.labels.push_back(p.year);
  }
  return s;
}

const std::vector<std::string> kPalette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};

void cmd_ingest(const Context& ctx) {
  const auto& ds = ctx.dataset;
  ctx.write("dataset.csv", report::dataset_csv(ds));
  ctx.summary << "ingest: " << ds.size() << " records, " << ds.first_year() << "-" << ds.last_year()
              << (ds.has_population() ? ", population joined" : "") << "\n";
}

void cmd_phase2d(const Context& ctx, const BackgroundFit& fit) {
  if (ctx.config.normalize_year) {
    AxisSpec axes;
    axes.x = ctx.config.x_axis == "per-capita" ? XAxis::per_capita_production : XAxis::production;
    axes.normalize_year = ctx.config.normalize_year;
    ctx.write("trajectory_normalized.csv", report::trajectory_csv(build_trajectory(ctx.dataset, axes)));
  }
  const auto traj = raw_trajectory(ctx, ZAxis::none);
  const auto crossings = find_crossings(traj);
  const auto loops = extract_loops(traj, crossings.crossings);
  const auto anomalies = anomaly_segments(traj, fit, ctx.config.anomaly_threshold);
  const auto excursions = excursion_loops(traj, anomalies);
  ctx.write("trajectory.csv", report::trajectory_csv(traj));
  ctx.write("crossings.json", report::dump(report::crossings_document(crossings, loops, anomalies, excursions)));

  std::vector<PlotSeries> data;
  std::vector<double> ks = ctx.config.k_curves;
  ks.push_back(fit.k);
  double ymax = 0.0;
  for (const auto& p : traj.points()) ymax = std::max(ymax, p.y);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    PlotSeries curve;
    const bool fitted = i + 1 == ks.size();
    curve.name = fitted ? "background k=" + sig4(ks[i]) + " (fit)" : "background k=" + sig4(ks[i]);
    curve.source_op = fitted ? "fit_background" : "limit_price_curve";
    curve.style = SeriesStyle::curve;
    curve.color = fitted ? "#000000" : kPalette[i % kPalette.size()];
    for (const auto& p : traj.points()) curve.points.emplace_back(p.x, ks[i] / eroei_for(ctx.eroei, p.year));
    data.push_back(std::move(curve));
  }
  data.push_back(timeline_series(traj, "build_trajectory"));

  PlotSpec spec;
  spec.kind = PlotKind::phase2d;
  spec.title = "Oil price vs production, " + std::to_string(traj.points().front().year) + "-" +
               std::to_string(traj.points().back().year);
  spec.x_label = x_label(ctx.config);
  spec.y_label = "Oil price (2014 US$/bbl)";
  spec.y_range = std::pair{0.0, 1.15 * ymax};
  ctx.write("phase2d.svg", render_plot(spec, data));

  ctx.summary << "phase2d: " << crossings.crossings.size() << " crossings, " << loops.loops.size()
              << " crossing loops, " << anomalies.size() << " anomaly intervals";
  for (const auto& a : anomalies) ctx.summary << " [" << a.first << "-" << a.last << "]";
  ctx.summary << "\n";
  for (const auto& l : excursions.loops)
    ctx.summary << "  excursion " << l.first_year << "-" << l.last_year << ": area " << sig4(l.signed_area)
                << (l.orientation > 0 ? " (counterclockwise)" : " (clockwise)") << "\n";
}

void cmd_phase3d(const Context& ctx, const BackgroundFit& fit) {
  const auto traj = raw_trajectory(ctx, ZAxis::eroei_model);
  const auto crossings = find_crossings(traj);
  const auto loops = extract_loops(traj, crossings.crossings);
  const auto anomalies = anomaly_segments(traj, fit, ctx.config.anomaly_threshold);
  const auto excursions = excursion_loops(traj, anomalies);
  ctx.write("trajectory3d.csv", report::trajectory_csv(traj));
  ctx.write("phase3d_loops.json", report::dump(report::crossings_document(crossings, loops, anomalies, excursions)));

  PlotSpec spec;
  spec.kind = PlotKind::phase3d_projection;
  spec.title = "Production, price and EROEI (left: production-price; right: view along the production axis)";
  spec.x_label = x_label(ctx.config);
  spec.y_label = "Oil price (2014 US$/bbl)";
  spec.z_label = "EROEI (dimensionless)";
  ctx.write("phase3d.svg", render_plot(spec, {timeline_series(traj, "build_trajectory")}));
  ctx.summary << "phase3d: " << traj.size() << " points, EROEI "
              << sig4(*traj.points().front().z) << " -> " << sig4(*traj.points().back().z) << "\n";
}

void cmd_fit_background(const Context& ctx, const BackgroundFit& fit) {
  const auto inv = product_invariance(ctx.dataset, ctx.eroei, fit.support_years);
  const auto traj = raw_trajectory(ctx, ZAxis::none);
  const auto anomalies = anomaly_segments(traj, fit, ctx.config.anomaly_threshold);
  const auto violations = envelope_violations(ctx.dataset, fit);
  ctx.write("fit.json", report::dump(report::fit_document(fit, inv, anomalies, violations)));

  std::vector<std::pair<double, std::vector<CurveSample>>> curves;
  std::vector<double> ks = ctx.config.k_curves;
  ks.push_back(fit.k);
  for (double k : ks) curves.emplace_back(k, limit_price_curve(k, 1.0, 30.0, 0.5));
  ctx.write("curves.csv", report::curves_csv(curves));

  std::vector<PlotSeries> data;
  double ymax = 0.0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    PlotSeries s;
    const bool fitted = i + 1 == curves.size();
    s.name = "k=" + sig4(curves[i].first) + (fitted ? " (fit)" : "");
    s.source_op = "limit_price_curve";
    s.style = SeriesStyle::curve;
    s.color = fitted ? "#000000" : kPalette[i % kPalette.size()];
    for (const auto& c : curves[i].second) s.points.emplace_back(c.eroei, c.price);
    data.push_back(std::move(s));
  }
  PlotSeries obs;
  obs.name = "observed";
  obs.source_op = "load_dataset";
  obs.style = SeriesStyle::markers;
  for (const auto& r : ctx.dataset.records()) {
    obs.points.emplace_back(eroei_for(ctx.eroei, r.year), r.price);
    obs.labels.push_back(r.year);
    ymax = std::max(ymax, r.price);
  }
  data.push_back(std::move(obs));
  PlotSpec spec;
  spec.kind = PlotKind::background_overlay;
  spec.title = "Limit-price curves P = k/EROEI";
  spec.x_label = "EROEI (dimensionless)";
  spec.y_label = "Oil price (2014 US$/bbl)";
  spec.y_range = std::pair{0.0, 1.5 * ymax};
  ctx.write("background.svg", render_plot(spec, data));

  ctx.summary << "fit-background: k = " << sig4(fit.k) << " +/- " << sig4(fit.k_std_error) << " US$/bbl on "
              << fit.support_years.size() << " support years"
              << (fit.in_reference_band ? "" : " (outside the 100-750 reference band)") << "\n"
              << "  cv(P*E) = " << sig4(inv.cv_product) << ", cv(P) = " << sig4(inv.cv_price) << "\n";
}

void cmd_fit_lorenz(const Context& ctx) {
  const auto& c = ctx.config;
  LorenzFit<double> fit;
  std::string source;
  double dt = 1.0;
  std::optional<Eigen::Index> reference;
  if (c.lorenz_input.empty()) {
    OilLorenzOptions opts;
    opts.normalize = c.lorenz_normalize;
    if (c.lorenz_reference) opts.reference = *c.lorenz_reference;
    if (opts.normalize) reference = opts.reference.value_or(default_reference_index(ctx.dataset));
    fit = fit_lorenz_oil(ctx.dataset, ctx.eroei, opts);
    source = "oil: X=production, Y=EROEI, Z=price";
  } else {
    const auto table = csv::read_file(c.lorenz_input);
    const auto col = [&](const char* name) {
      auto i = table.column(name);
      if (!i) throw Error(ErrorKind::configuration, "lorenz-lab", std::string("missing column '") + name + "'", c.lorenz_input);
      return *i;
    };
    const auto ct = col("t"), cx = col("x"), cy = col("y"), cz = col("z");
    std::vector<double> t, x, y, z;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      auto num = [&](std::size_t j) {
        auto v = csv::parse_double(table.rows[i][j]);
        if (!v) throw Error(ErrorKind::validation, "lorenz-lab", "non-numeric cell", c.lorenz_input + ":" + std::to_string(table.row_numbers[i]));
        return *v;
      };
      const double ti = num(ct);
      if (ti < c.t_start) continue;
      t.push_back(ti);
      x.push_back(num(cx));
      y.push_back(num(cy));
      z.push_back(num(cz));
    }
    if (t.size() < 4) throw Error(ErrorKind::validation, "lorenz-lab", "fewer than 4 samples after t_start", c.lorenz_input);
    dt = t[1] - t[0];
    for (std::size_t i = 1; i < t.size(); ++i)
      if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * std::abs(dt))
        throw Error(ErrorKind::validation, "lorenz-lab", "samples are not uniformly spaced", c.lorenz_input);
    auto vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval(); };
    if (c.lorenz_reference) reference = *c.lorenz_reference;
    fit = fit_lorenz<double>(vec(x), vec(y), vec(z), dt, reference);
    source = c.lorenz_input;
  }
  ctx.write("lorenz_fit.json", report::dump(report::lorenz_fit_document(fit, source, dt, reference)));
  ctx.summary << "fit-lorenz: K1 = " << sig4(fit.k1) << " +/- " << sig4(fit.se1) << ", K2 = " << sig4(fit.k2)
              << " +/- " << sig4(fit.se2) << ", K3 = " << sig4(fit.k3) << " +/- " << sig4(fit.se3) << " ("
              << fit.n_points << " points)\n";
}

void cmd_simulate_lorenz(const RunConfig& c, const fs::path& out, std::ostream& summary) {
  const LorenzParams<double> p{c.sigma, c.r, c.b};
  const long steps = std::lround(c.t_end / c.dt);
  const auto traj = integrate<double>(p, {c.x0, c.y0, c.z0}, c.dt, steps);
  report::write_file(out / "lorenz.csv", report::lorenz_csv(traj, 0.0, c.dt));
  summary << "  wrote lorenz.csv\n";

  const auto stats = product_statistics<double>(traj);
  const double cv_z = coefficient_of_variation(traj.col(2));
  report::write_file(out / "lorenz_stats.json", report::dump(report::lorenz_stats_document(p, stats, cv_z)));
  summary << "  wrote lorenz_stats.json\n";

  PlotSeries s;
  s.name = "lorenz (x, z)";
  s.source_op = "integrate";
  s.style = SeriesStyle::curve;
  s.color = "#2c3e50";
  for (Eigen::Index i = 0; i < traj.rows(); ++i) s.points.emplace_back(traj(i, 0), traj(i, 2));
  PlotSpec spec;
  spec.kind = PlotKind::lorenz;
  spec.title = "Lorenz-63, sigma=" + sig4(p.sigma) + " r=" + sig4(p.r) + " b=" + sig4(p.b);
  spec.x_label = "X (convective intensity)";
  spec.y_label = "Z (profile deviation)";
  spec.label_points = false;
  report::write_file(out / "lorenz.svg", render_plot(spec, {s}));
  summary << "  wrote lorenz.svg\n";

  const Eigen::Vector3d last = traj.row(traj.rows() - 1).transpose();
  summary << "simulate-lorenz: " << traj.rows() << " states, final (" << sig4(last.x()) << ", " << sig4(last.y())
          << ", " << sig4(last.z()) << "), divergence " << sig4(divergence(p)) << "\n";
}

void cmd_attractor(const Context& ctx) {
  const auto pc = per_capita(ctx.dataset);
  const auto trailing = attractor_statistics(pc, std::min(ctx.config.attractor_window, pc.size()));
  const auto full = attractor_statistics(pc, pc.size());
  ctx.write("per_capita.csv", report::series_csv(pc, "tons_per_person"));
  ctx.write("attractor.json", report::dump(report::attractor_document(trailing, full)));

  PlotSeries s;
  s.name = "per-capita timeline";
  s.source_op = "per_capita";
  for (std::size_t i = 0; i < pc.size(); ++i) {
    s.points.emplace_back(ctx.dataset.records()[i].price, pc[i].value);
    s.labels.push_back(pc[i].year);
  }
  PlotSpec spec;
  spec.kind = PlotKind::per_capita;
  spec.title = "Per-capita oil production vs oil price";
  spec.x_label = "Oil price (2014 US$/bbl)";
  spec.y_label = "Oil production per capita (t/person)";
  spec.guides.push_back({ctx.config.attractor_reference, sig4(ctx.config.attractor_reference) + " t/person"});
  ctx.write("per_capita.svg", render_plot(spec, {s}));
  ctx.summary << "attractor: trailing " << trailing.first_year << "-" << trailing.last_year << " mean "
              << sig4(trailing.mean) << " t/person (" << sig4(trailing.min) << " to " << sig4(trailing.max)
              << "); full-range mean " << sig4(full.mean) << "\n";
}

void cmd_scenario(const Context& ctx, const std::optional<BackgroundFit>& fit) {
  if (!ctx.model)
    throw Error(ErrorKind::configuration, "scenario", "scenario needs a linear EROEI model, not a per-year column");
  double k = 0.0;
  if (ctx.config.scenario_k == "fit") {
    k = fit ? fit->k : run_fit(ctx).k;
  } else {
    auto v = csv::parse_double(ctx.config.scenario_k);
    if (!v) throw Error(ErrorKind::configuration, "scenario", "--k must be 'fit' or a number", ctx.config.scenario_k);
    k = *v;
  }
  const auto result = crossing_year(k, *ctx.model, ctx.config.threshold, ctx.dataset);
  ctx.write("scenario.json", report::dump(report::scenario_document(result, *ctx.model)));

  // The model reaches zero at this year; the path must stay before it.
  const double zero_year = ctx.model->year_start() - ctx.model->e_start() / ctx.model->slope();
  int last = std::max(result.reference_year + 1, static_cast<int>(std::ceil(result.crossing_year)) + 5);
  last = std::min(last, static_cast<int>(std::ceil(zero_year)) - 1);
  const int first = ctx.dataset.first_year();
  if (last >= first) ctx.write("price_path.csv", report::series_csv(background_price_path(k, *ctx.model, first, last), "background_price"));

  ctx.summary << "scenario: k = " << sig4(k) << ", threshold " << sig4(result.threshold_price) << " US$/bbl reached at EROEI "
              << sig4(result.eroei_at_crossing) << " in " << fixed1(result.crossing_year) << " ("
              << sig4(result.years_from_reference) << " years after " << result.reference_year << "), production "
              << sig4(result.production_at_crossing) << " Mton/yr" << (result.already_crossed ? " [already crossed]" : "")
              << "\n";
}

}  // namespace

void run(const RunConfig& c, std::ostream& summary) {
  const fs::path out(c.out_dir);
  fs::create_directories(out);
  report::write_file(out / "config.json", to_json(c).dump(2) + "\n");

  if (c.subcommand == "simulate-lorenz") {
    cmd_simulate_lorenz(c, out, summary);
    return;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) == kSubcommands.end())
    throw Error(ErrorKind::usage, kModule, "unknown subcommand '" + c.subcommand + "'");
  if (c.x_axis != "production" && c.x_axis != "per-capita")
    throw Error(ErrorKind::configuration, kModule, "--x-axis must be production or per-capita", c.x_axis);

  Context ctx = make_context(c, summary);
  const auto& cmd = c.subcommand;
  if (cmd == "ingest") {
    cmd_ingest(ctx);
  } else if (cmd == "phase2d") {
    cmd_phase2d(ctx, run_fit(ctx));
  } else if (cmd == "phase3d") {
    cmd_phase3d(ctx, run_fit(ctx));
  } else if (cmd == "fit-background") {
    cmd_fit_background(ctx, run_fit(ctx));
  } else if (cmd == "fit-lorenz") {
    cmd_fit_lorenz(ctx);
  } else if (cmd == "attractor") {
    cmd_attractor(ctx);
  } else if (cmd == "scenario") {
    cmd_scenario(ctx, std::nullopt);
  } else if (cmd == "report-all") {
    const auto fit = run_fit(ctx);
    cmd_ingest(ctx);
    cmd_fit_background(ctx, fit);
    cmd_phase2d(ctx, fit);
    cmd_phase3d(ctx, fit);
    cmd_fit_lorenz(ctx);
    cmd_simulate_lorenz(c, out, summary);
    if (ctx.dataset.has_population()) cmd_attractor(ctx);
    if (ctx.model) cmd_scenario(ctx, fit);
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    // A --config file supplies defaults; explicit flags override it.
    for (int i = 1; i + 1 < argc; ++i) {
      if (std::string(argv[i]) == "--config") {
        std::ifstream in(argv[i + 1]);
        if (!in) throw Error(ErrorKind::io, kModule, "cannot open config", argv[i + 1]);
        json doc;
        try {
          in >> doc;
        } catch (const json::exception& e) {
          throw Error(ErrorKind::configuration, kModule, std::string("config is not valid JSON: ") + e.what(), argv[i + 1]);
        }
        config = config_from_json(doc);
      }
    }

    CLI::App app{"Oil price-production phase portrait toolkit"};
    app.fallthrough();
    app.require_subcommand(1);
    std::string config_path, save_config;
    int normalize_year = 0;
    long lorenz_reference = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--save-config", save_config, "write the effective configuration and exit");
    app.add_option("--out-dir,-o", config.out_dir, "output directory");
    app.add_option("--data", config.data_path, "production/price CSV (default: bundled data)");
    app.add_option("--population-file", config.population_path, "population CSV (default: bundled data)");
    app.add_option("--col-year", config.col_year);
    app.add_option("--col-production", config.col_production);
    app.add_option("--col-price", config.col_price);
    app.add_option("--col-population", config.col_population);
    app.add_option("--col-deflator", config.col_deflator, "deflator index column; implies nominal prices");
    app.add_option("--col-eroei", config.col_eroei, "per-year EROEI column instead of the linear model");
    app.add_flag("--nominal-prices", config.nominal_prices);
    app.add_option("--base-year", config.base_year);
    app.add_option("--x-axis", config.x_axis)->check(CLI::IsMember({"production", "per-capita"}));
    auto* norm = app.add_option("--normalize", normalize_year, "reference year for dimensionless axes");
    app.add_option("--anomaly-threshold", config.anomaly_threshold);
    app.add_option("--eroei-anchors", config.eroei_anchors, "y0:e0,y1:e1");
    app.add_option("--support-years", config.support_years)->delimiter(',');
    app.add_option("--k-curves", config.k_curves)->delimiter(',');
    app.add_option("--bootstrap-draws", config.bootstrap_draws);
    app.add_option("--seed", config.seed);
    app.add_option("--sigma", config.sigma);
    app.add_option("--r", config.r);
    app.add_option("--b", config.b);
    app.add_option("--x0", config.x0);
    app.add_option("--y0", config.y0);
    app.add_option("--z0", config.z0);
    app.add_option("--dt", config.dt);
    app.add_option("--t-end", config.t_end);
    app.add_option("--t-start", config.t_start);
    app.add_option("--input", config.lorenz_input, "fit-lorenz: trajectory CSV (t,x,y,z)");
    auto* lref = app.add_option("--reference", lorenz_reference, "fit-lorenz: normalization sample index");
    app.add_option("--normalize-lorenz", config.lorenz_normalize);
    app.add_option("--window", config.attractor_window);
    app.add_option("--k", config.scenario_k, "'fit' or a limit price");
    app.add_option("--threshold", config.threshold);
    for (const auto& name : kSubcommands) app.add_subcommand(name);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      if (app.get_subcommands().empty()) {
        for (const auto& extra : app.remaining())
          if (!extra.empty() && extra.front() != '-')
            throw Error(ErrorKind::usage, kModule, "unknown subcommand '" + extra + "' (see --help)", extra);
      }
      throw Error(ErrorKind::usage, kModule, e.what() + std::string(" (see --help)"));
    }
    if (!app.get_subcommands().empty()) config.subcommand = app.get_subcommands().front()->get_name();
    if (norm->count()) config.normalize_year = normalize_year;
    if (lref->count()) config.lorenz_reference = lorenz_reference;
    if (!config.col_deflator.empty()) config.nominal_prices = true;

    if (!save_config.empty()) {
      report::write_file(save_config, to_json(config).dump(2) + "\n");
      return 0;
    }
    run(config, out);
    return 0;
  } catch (const std::exception& e) {
    err << report::error_document(e).dump() << "\n";
    const auto* pe = dynamic_cast<const Error*>(&e);
    return pe && pe->kind() == ErrorKind::usage ? 2 : 1;
  }
}

}  // namespace phaseportrait
