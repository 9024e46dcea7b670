#include "foliation/grid.hpp"

#include <cmath>
#include <string>

#include "foliation/errors.hpp"

namespace foliation {

TimeGrid TimeGrid::from_horizon(double horizon, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw ConfigError("horizon " + std::to_string(horizon) +
                      " is not an integer multiple of dt");
  TimeGrid grid;
  grid.dt = dt;
  grid.nodes = static_cast<std::size_t>(std::round(steps)) + 1;
  return grid;
}

}  // namespace foliation
