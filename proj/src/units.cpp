#include "ramanopt/units.hpp"

#include <map>

#include "ramanopt/constants.hpp"

namespace ramanopt {

namespace {

struct UnitEntry {
  Dimension dim;
  double factor;
};

const std::map<std::string, UnitEntry>& unit_table() {
  static const std::map<std::string, UnitEntry> table = {
      {"rad/s", {Dimension::rate, 1.0}},
      {"Hz", {Dimension::rate, 1.0}},
      {"kHz", {Dimension::rate, 1e3}},
      {"MHz", {Dimension::rate, 1e6}},
      {"GHz", {Dimension::rate, 1e9}},
      {"2pi Hz", {Dimension::rate, two_pi}},
      {"2pi kHz", {Dimension::rate, two_pi * 1e3}},
      {"2pi MHz", {Dimension::rate, two_pi * 1e6}},
      {"2pi GHz", {Dimension::rate, two_pi * 1e9}},
      {"W", {Dimension::power, 1.0}},
      {"mW", {Dimension::power, 1e-3}},
      {"uW", {Dimension::power, 1e-6}},
      {"nW", {Dimension::power, 1e-9}},
      {"pW", {Dimension::power, 1e-12}},
      {"m", {Dimension::length, 1.0}},
      {"mm", {Dimension::length, 1e-3}},
      {"um", {Dimension::length, 1e-6}},
      {"nm", {Dimension::length, 1e-9}},
      {"kg", {Dimension::mass, 1.0}},
      {"g", {Dimension::mass, 1e-3}},
      {"mg", {Dimension::mass, 1e-6}},
      {"ug", {Dimension::mass, 1e-9}},
      {"ng", {Dimension::mass, 1e-12}},
      {"K", {Dimension::temperature, 1.0}},
      {"s", {Dimension::time, 1.0}},
      {"ms", {Dimension::time, 1e-3}},
      {"us", {Dimension::time, 1e-6}},
      {"ns", {Dimension::time, 1e-9}},
      {"1", {Dimension::dimensionless, 1.0}},
  };
  return table;
}

}  // namespace

double unit_factor(const std::string& unit, Dimension dim) {
  auto it = unit_table().find(unit);
  if (it == unit_table().end())
    throw ConfigError("unknown unit tag '" + unit + "'");
  if (it->second.dim != dim)
    throw ConfigError("unit '" + unit + "' has the wrong dimension here");
  return it->second.factor;
}

double parse_quantity(const nlohmann::json& j, Dimension dim,
                      const std::string& field_name) {
  if (!j.is_object() || !j.contains("value") || !j.contains("unit"))
    throw ConfigError("field '" + field_name +
                      "' must be an object { \"value\": number, \"unit\": string }");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "value" && it.key() != "unit")
      throw ConfigError("field '" + field_name + "': unknown key '" + it.key() + "'");
  if (!j["value"].is_number())
    throw ConfigError("field '" + field_name + "': value must be a number");
  if (!j["unit"].is_string())
    throw ConfigError("field '" + field_name + "': unit must be a string");
  const double v = j["value"].get<double>();
  return v * unit_factor(j["unit"].get<std::string>(), dim);
}

}  // namespace ramanopt
