#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace phaseportrait {

/// One year of the sampled oil system. Production in Mton/yr, price in
/// constant 2014 US$ per barrel, population in persons, EROEI dimensionless.
struct AnnualRecord {
  int year = 0;
  double production = 0.0;
  double price = 0.0;
  std::optional<double> population;
  std::optional<double> eroei;
};

struct YearValue {
  int year = 0;
  double value = 0.0;
};
using Series = std::vector<YearValue>;

/// Validated, immutable collection of contiguous yearly records.
class Dataset {
 public:
  static constexpr std::size_t min_records = 4;

  /// Sorts by year, then enforces the record and contiguity invariants.
  explicit Dataset(std::vector<AnnualRecord> records, std::string source_label = {});

  const std::vector<AnnualRecord>& records() const noexcept { return records_; }
  const std::string& source_label() const noexcept { return source_label_; }
  std::size_t size() const noexcept { return records_.size(); }
  int first_year() const { return records_.front().year; }
  int last_year() const { return records_.back().year; }

  const AnnualRecord* find(int year) const;
  bool has_population() const;
  bool has_eroei() const;

  Eigen::VectorXd production() const;
  Eigen::VectorXd price() const;
  Series production_series() const;
  Series price_series() const;

 private:
  std::vector<AnnualRecord> records_;
  std::string source_label_;
};

enum class PriceMode {
  deflated,  ///< price column already in constant base-year dollars
  nominal,   ///< price column nominal; deflator column converts it
};

/// Maps CSV header names onto record fields. Optional columns left empty are
/// not read.
struct ColumnMapping {
  std::string year = "year";
  std::string production = "production_mton";
  std::string price = "price_2014usd";
  std::string population;
  std::string eroei;
  std::string deflator;
  PriceMode price_mode = PriceMode::deflated;
  int base_year = 2014;
};

Dataset load_dataset(const std::filesystem::path& path, const ColumnMapping& mapping);

/// Reads a (year, value) two-column file, e.g. world population.
Series load_series(const std::filesystem::path& path, const std::string& year_column,
                   const std::string& value_column);

/// Returns a copy of `dataset` with population taken from `population`.
/// Every dataset year must be present.
Dataset join_population(const Dataset& dataset, const Series& population);

/// price(y) * index(base) / index(y). The index is renormalized so the base
/// year maps onto itself.
Series deflate_prices(const Series& nominal, const Series& deflator, int base_year = 2014);

/// Tons per person: production (Mton) * 1e6 / population.
Series per_capita(const Dataset& dataset);

/// Divides every value by the value at `reference_year`.
Series nondimensionalize(const Series& series, int reference_year);

/// Linear EROEI decline through two anchor years.
class EroeiModel {
 public:
  EroeiModel(double year_start, double e_start, double year_end, double e_end);

  /// The default documented configuration: 15 at the first dataset year
  /// declining linearly to 10 at the last.
  static EroeiModel default_for(const Dataset& dataset);

  double year_start() const noexcept { return year_start_; }
  double e_start() const noexcept { return e_start_; }
  double year_end() const noexcept { return year_end_; }
  double e_end() const noexcept { return e_end_; }
  double slope() const noexcept { return (e_end_ - e_start_) / (year_end_ - year_start_); }

 private:
  double year_start_;
  double e_start_;
  double year_end_;
  double e_end_;
};

struct EroeiValue {
  double value = 0.0;
  bool extrapolated = false;
};

EroeiValue eroei_at(const EroeiModel& model, double year);

}  // namespace phaseportrait
