#pragma once

#include <cmath>

#include "hpflex/error.hpp"
#include "hpflex/static_data.hpp"

namespace hpflex {

// Constant yearly payment repaying `overnight` over `lifetime` years at
// `rate`. Same unit as `overnight`, per year.
inline double annuity(double overnight, double rate, double lifetime) {
  if (rate < 0.0 || lifetime < 1.0) fail(ErrorKind::invalid_argument, "annuity needs rate >= 0 and lifetime >= 1");
  if (rate == 0.0) return overnight / lifetime;
  const double growth = std::pow(1.0 + rate, lifetime);
  return overnight * rate * growth / (growth - 1.0);
}

// EUR per MWh of electricity: fuel plus carbon, both per MWh of fuel, divided
// by conversion efficiency.
inline double variable_cost(const TechnologySpec& tech, double co2_price) {
  if (!(tech.efficiency > 0.0)) fail(ErrorKind::division_domain, "efficiency must be > 0");
  return (tech.fuel_cost + co2_price * tech.carbon_content) / tech.efficiency;
}

// Share of a yearly cost attributable to a window of `window_hours`.
inline double prorate_fixed_costs(double annual, long window_hours) {
  if (window_hours < 1 || window_hours > 8760)
    fail(ErrorKind::invalid_argument, "window must span 1..8760 hours");
  return annual * static_cast<double>(window_hours) / 8760.0;
}

}  // namespace hpflex
