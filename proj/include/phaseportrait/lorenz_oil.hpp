#pragma once

#include <optional>

#include "phaseportrait/data_model.hpp"
#include "phaseportrait/envelope_fit.hpp"
#include "phaseportrait/lorenz.hpp"

namespace phaseportrait {

/// Oil data mapped onto the Lorenz variables: X = production, Y = EROEI,
/// Z = price, sampled yearly (dt = 1).
struct OilLorenzOptions {
  bool normalize = true;
  /// Sample index used for nondimensionalization; the central sample when
  /// empty.
  std::optional<Eigen::Index> reference;
};

Eigen::Index default_reference_index(const Dataset& dataset);

LorenzFit<double> fit_lorenz_oil(const Dataset& dataset, const EroeiSource& eroei,
                                 const OilLorenzOptions& options = {});

}  // namespace phaseportrait
