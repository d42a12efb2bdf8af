#include "phaseportrait/lorenz_oil.hpp"

namespace phaseportrait {

Eigen::Index default_reference_index(const Dataset& dataset) {
  return static_cast<Eigen::Index>(dataset.size() / 2);
}

LorenzFit<double> fit_lorenz_oil(const Dataset& dataset, const EroeiSource& eroei,
                                 const OilLorenzOptions& options) {
  const auto n = static_cast<Eigen::Index>(dataset.size());
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i)
    e(i) = eroei_for(eroei, dataset.records()[static_cast<std::size_t>(i)].year);
  std::optional<Eigen::Index> reference;
  if (options.normalize) reference = options.reference.value_or(default_reference_index(dataset));
  return fit_lorenz<double>(dataset.production(), e, dataset.price(), 1.0, reference);
}

}  // namespace phaseportrait
