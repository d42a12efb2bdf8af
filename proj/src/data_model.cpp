#include "phaseportrait/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "phaseportrait/csv.hpp"
#include "phaseportrait/error.hpp"

namespace phaseportrait {

namespace {

constexpr const char* kModule = "data-model";

[[noreturn]] void fail(ErrorKind kind, const std::string& message,
                       const std::string& location = {}) {
  throw Error(kind, kModule, message, location);
}

std::size_t require_column(const csv::Table& table, const std::string& name,
                           const std::string& source) {
  auto col = table.column(name);
  if (!col) fail(ErrorKind::configuration, "missing column '" + name + "'", source);
  return *col;
}

double require_number(const csv::Table& table, std::size_t row, std::size_t col,
                      const std::string& source) {
  auto value = csv::parse_double(table.rows[row][col]);
  if (!value || !std::isfinite(*value)) {
    fail(ErrorKind::validation,
         "non-numeric cell '" + table.rows[row][col] + "' in column '" + table.header[col] + "'",
         source + ":" + std::to_string(table.row_numbers[row]));
  }
  return *value;
}

int require_year(const csv::Table& table, std::size_t row, std::size_t col,
                 const std::string& source) {
  auto value = csv::parse_integer(table.rows[row][col]);
  if (!value) {
    fail(ErrorKind::validation, "non-integer year '" + table.rows[row][col] + "'",
         source + ":" + std::to_string(table.row_numbers[row]));
  }
  return static_cast<int>(*value);
}

void validate_record(const AnnualRecord& r, const std::string& location) {
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorKind::validation, std::string(name) + " must be positive", location);
  };
  positive(r.production, "production");
  positive(r.price, "price");
  if (r.population) positive(*r.population, "population");
  if (r.eroei && !(*r.eroei >= 1.0))
    fail(ErrorKind::validation, "eroei must be >= 1", location);
}

}  // namespace

Dataset::Dataset(std::vector<AnnualRecord> records, std::string source_label)
    : records_(std::move(records)), source_label_(std::move(source_label)) {
  if (records_.size() < min_records) {
    fail(ErrorKind::validation, "dataset needs at least " + std::to_string(min_records) +
                                    " records, got " + std::to_string(records_.size()),
         source_label_);
  }
  std::stable_sort(records_.begin(), records_.end(),
                   [](const AnnualRecord& a, const AnnualRecord& b) { return a.year < b.year; });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i], "year " + std::to_string(records_[i].year));
    if (i == 0) continue;
    int prev = records_[i - 1].year;
    int cur = records_[i].year;
    if (cur == prev) fail(ErrorKind::validation, "duplicate year", std::to_string(cur));
    if (cur != prev + 1) {
      std::string gap = std::to_string(prev + 1);
      if (cur - 1 > prev + 1) gap += "-" + std::to_string(cur - 1);
      fail(ErrorKind::validation, "non-contiguous years: gap at " + gap, gap);
    }
  }
}

const AnnualRecord* Dataset::find(int year) const {
  int offset = year - first_year();
  if (offset < 0 || offset >= static_cast<int>(records_.size())) return nullptr;
  return &records_[static_cast<std::size_t>(offset)];
}

bool Dataset::has_population() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const AnnualRecord& r) { return r.population.has_value(); });
}

bool Dataset::has_eroei() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const AnnualRecord& r) { return r.eroei.has_value(); });
}

Eigen::VectorXd Dataset::production() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(records_.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) v(static_cast<Eigen::Index>(i)) = records_[i].production;
  return v;
}

Eigen::VectorXd Dataset::price() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(records_.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) v(static_cast<Eigen::Index>(i)) = records_[i].price;
  return v;
}

Series Dataset::production_series() const {
  Series s;
  s.reserve(records_.size());
  for (const auto& r : records_) s.push_back({r.year, r.production});
  return s;
}

Series Dataset::price_series() const {
  Series s;
  s.reserve(records_.size());
  for (const auto& r : records_) s.push_back({r.year, r.price});
  return s;
}

Dataset load_dataset(const std::filesystem::path& path, const ColumnMapping& mapping) {
  const std::string source = path.string();
  auto table = csv::read_file(path);
  if (table.header.empty() || table.rows.empty())
    fail(ErrorKind::validation, "empty dataset file", source);

  auto c_year = require_column(table, mapping.year, source);
  auto c_prod = require_column(table, mapping.production, source);
  auto c_price = require_column(table, mapping.price, source);
  std::optional<std::size_t> c_pop, c_eroei, c_defl;
  if (!mapping.population.empty()) c_pop = require_column(table, mapping.population, source);
  if (!mapping.eroei.empty()) c_eroei = require_column(table, mapping.eroei, source);
  if (mapping.price_mode == PriceMode::nominal) {
    if (mapping.deflator.empty())
      fail(ErrorKind::configuration, "nominal price mode requires a deflator column", source);
    c_defl = require_column(table, mapping.deflator, source);
  }

  std::vector<AnnualRecord> records;
  Series nominal, deflator;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    AnnualRecord r;
    r.year = require_year(table, i, c_year, source);
    r.production = require_number(table, i, c_prod, source);
    r.price = require_number(table, i, c_price, source);
    if (c_pop) r.population = require_number(table, i, *c_pop, source);
    if (c_eroei) r.eroei = require_number(table, i, *c_eroei, source);
    validate_record(r, source + ":" + std::to_string(table.row_numbers[i]));
    if (c_defl) {
      double idx = require_number(table, i, *c_defl, source);
      if (!(idx > 0.0))
        fail(ErrorKind::validation, "deflator must be positive",
             source + ":" + std::to_string(table.row_numbers[i]));
      nominal.push_back({r.year, r.price});
      deflator.push_back({r.year, idx});
    }
    records.push_back(r);
  }

  if (c_defl) {
    std::sort(nominal.begin(), nominal.end(),
              [](const YearValue& a, const YearValue& b) { return a.year < b.year; });
    auto real = deflate_prices(nominal, deflator, mapping.base_year);
    std::map<int, double> by_year;
    for (const auto& yv : real) by_year[yv.year] = yv.value;
    for (auto& r : records) r.price = by_year.at(r.year);
  }
  return Dataset(std::move(records), source);
}

Series load_series(const std::filesystem::path& path, const std::string& year_column,
                   const std::string& value_column) {
  const std::string source = path.string();
  auto table = csv::read_file(path);
  if (table.rows.empty()) fail(ErrorKind::validation, "empty series file", source);
  auto c_year = require_column(table, year_column, source);
  auto c_value = require_column(table, value_column, source);
  Series out;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    out.push_back({require_year(table, i, c_year, source), require_number(table, i, c_value, source)});
  std::sort(out.begin(), out.end(), [](const YearValue& a, const YearValue& b) { return a.year < b.year; });
  return out;
}

Dataset join_population(const Dataset& dataset, const Series& population) {
  std::map<int, double> by_year;
  for (const auto& yv : population) by_year[yv.year] = yv.value;
  auto records = dataset.records();
  for (auto& r : records) {
    auto it = by_year.find(r.year);
    if (it == by_year.end())
      fail(ErrorKind::validation, "no population for year " + std::to_string(r.year),
           std::to_string(r.year));
    r.population = it->second;
  }
  return Dataset(std::move(records), dataset.source_label());
}

Series deflate_prices(const Series& nominal, const Series& deflator, int base_year) {
  std::map<int, double> index;
  for (const auto& yv : deflator) index[yv.year] = yv.value;
  auto base = index.find(base_year);
  if (base == index.end())
    fail(ErrorKind::validation, "deflator has no entry for base year " + std::to_string(base_year),
         std::to_string(base_year));
  const double base_index = base->second;
  Series out;
  out.reserve(nominal.size());
  for (const auto& yv : nominal) {
    auto it = index.find(yv.year);
    if (it == index.end())
      fail(ErrorKind::validation, "deflator has no entry for year " + std::to_string(yv.year),
           std::to_string(yv.year));
    // Renormalize so index(base) == 1; the base year then maps onto itself.
    const double relative = it->second / base_index;
    out.push_back({yv.year, yv.year == base_year ? yv.value : yv.value / relative});
  }
  return out;
}

Series per_capita(const Dataset& dataset) {
  Series out;
  out.reserve(dataset.size());
  for (const auto& r : dataset.records()) {
    if (!r.population)
      fail(ErrorKind::validation, "missing population for year " + std::to_string(r.year),
           std::to_string(r.year));
    out.push_back({r.year, r.production * 1.0e6 / *r.population});
  }
  return out;
}

Series nondimensionalize(const Series& series, int reference_year) {
  auto ref = std::find_if(series.begin(), series.end(),
                          [&](const YearValue& yv) { return yv.year == reference_year; });
  if (ref == series.end())
    fail(ErrorKind::validation, "reference year " + std::to_string(reference_year) + " not in series",
         std::to_string(reference_year));
  if (ref->value == 0.0)
    fail(ErrorKind::numerical, "reference value is zero", std::to_string(reference_year));
  const double scale = ref->value;
  Series out;
  out.reserve(series.size());
  for (const auto& yv : series) out.push_back({yv.year, yv.value / scale});
  return out;
}

EroeiModel::EroeiModel(double year_start, double e_start, double year_end, double e_end)
    : year_start_(year_start), e_start_(e_start), year_end_(year_end), e_end_(e_end) {
  if (!(year_end > year_start))
    fail(ErrorKind::configuration, "EROEI anchors need year_end > year_start");
  if (!(e_start > 0.0) || !(e_end > 0.0))
    fail(ErrorKind::configuration, "EROEI anchor values must be positive");
}

EroeiModel EroeiModel::default_for(const Dataset& dataset) {
  return EroeiModel(dataset.first_year(), 15.0, dataset.last_year(), 10.0);
}

EroeiValue eroei_at(const EroeiModel& model, double year) {
  const double t = (year - model.year_start()) / (model.year_end() - model.year_start());
  return {std::lerp(model.e_start(), model.e_end(), t),
          year < model.year_start() || year > model.year_end()};
}

}  // namespace phaseportrait
