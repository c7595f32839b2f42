#pragma once

#include "scatter_sense/geometry.hpp"

#include <json.hpp>

#include <string_view>

namespace scatter_sense {

// Parse helpers that turn malformed documents into SchemaError.
nlohmann::json parse_json(std::string_view text, std::string_view what);
double json_number(const nlohmann::json& obj, const char* key);
Vec3 json_vec3(const nlohmann::json& obj, const char* key);
nlohmann::json to_json(const Vec3& v);

}  // namespace scatter_sense
