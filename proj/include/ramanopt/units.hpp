#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ramanopt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical dimension of a config field. Rates and frequencies are all
// carried as angular frequencies (rad/s) internally; the unit tag in the
// config decides the conversion factor once, at ingest.
enum class Dimension {
  rate,         // rad/s
  power,        // W
  length,       // m
  mass,         // kg
  temperature,  // K
  time,         // s
  dimensionless,
};

// Numeric factor for a unit tag, or throws ConfigError on an unknown tag
// or a tag of the wrong dimension.  Tags: "rad/s", "Hz".."GHz",
// "2pi Hz".."2pi GHz", "pW".."W", "nm".."m", "ng".."kg", "K", "s".."ns", "1".
double unit_factor(const std::string& unit, Dimension dim);

// Reads { "value": v, "unit": u } and converts to the internal unit.
double parse_quantity(const nlohmann::json& j, Dimension dim,
                      const std::string& field_name);

}  // namespace ramanopt
