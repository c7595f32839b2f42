#include "scatter_sense/json_io.hpp"

#include "scatter_sense/error.hpp"

#include <fmt/format.h>

namespace scatter_sense {

nlohmann::json parse_json(std::string_view text, std::string_view what)
{
    try {
        auto doc = nlohmann::json::parse(text);
        if (!doc.is_object()) throw SchemaError(fmt::format("{}: top level must be a JSON object", what));
        return doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(fmt::format("{}: invalid JSON: {}", what, e.what()));
    }
}

double json_number(const nlohmann::json& obj, const char* key)
{
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw SchemaError(fmt::format("missing numeric key '{}'", key));
    return it->get<double>();
}

Vec3 json_vec3(const nlohmann::json& obj, const char* key)
{
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_array() || it->size() != 3) {
        throw SchemaError(fmt::format("key '{}' must be a 3-element array", key));
    }
    for (const auto& v : *it) {
        if (!v.is_number()) throw SchemaError(fmt::format("key '{}' must hold numbers", key));
    }
    return {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
}

nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }

}  // namespace scatter_sense
