#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "expstable/measure.hpp"

namespace expstable {

// Shortest decimal that round-trips the exact double (via to_chars).
std::string format_double(double x);
double parse_double(std::string_view text);

// CSV form: "position,mass" header then one row per atom.
std::string to_csv(const PointConfiguration& cfg);
PointConfiguration config_from_csv(std::string_view csv);

// JSON form: {"atoms":[[pos,mass],...],"window":[lo,hi]}. Infinite window
// bounds are encoded as the strings "inf"/"-inf"; a missing window is null.
nlohmann::json to_json(const PointConfiguration& cfg);
PointConfiguration config_from_json(const nlohmann::json& j);

nlohmann::json window_to_json(const Window& w);
Window window_from_json(const nlohmann::json& j);

}  // namespace expstable
