#include "scatter_sense/materials.hpp"

#include "scatter_sense/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scatter_sense {

namespace {

constexpr double kConductivityFactor = 17.98;

double required_number(const nlohmann::json& record, const char* key, std::size_t index)
{
    const auto it = record.find(key);
    if (it == record.end() || !it->is_number()) {
        throw SchemaError(fmt::format("material record {}: missing numeric key '{}'", index + 1, key),
                          index + 1);
    }
    return it->get<double>();
}

}  // namespace

void validate(const MaterialParams& params)
{
    if (params.name.empty()) throw DomainError("material name must not be empty");
    if (!(params.a > 0.0)) throw DomainError(fmt::format("material '{}': a must be > 0", params.name));
    if (!(params.c >= 0.0)) throw DomainError(fmt::format("material '{}': c must be >= 0", params.name));
    if (!(params.roughness_m >= 0.0)) {
        throw DomainError(fmt::format("material '{}': roughness must be >= 0", params.name));
    }
}

ComplexPermittivity relative_permittivity(const MaterialParams& params, double f_ghz)
{
    if (!(f_ghz > 0.0)) throw DomainError(fmt::format("frequency must be positive, got {} GHz", f_ghz));
    const double conductivity = params.c * std::pow(f_ghz, params.d);
    return {params.a * std::pow(f_ghz, params.b), kConductivityFactor * conductivity / f_ghz};
}

MaterialCatalog::MaterialCatalog(std::vector<MaterialParams> materials)
{
    for (auto& m : materials) add(std::move(m));
}

MaterialCatalog MaterialCatalog::builtin()
{
    return MaterialCatalog({
        {"wood", 1.99, 0.0, 0.0047, 1.0718, 0.0004},
        {"plasterboard", 2.94, 0.0, 0.0116, 0.7076, 0.0002},
        {"glass", 6.27, 0.0, 0.0043, 1.1925, 0.0},
    });
}

MaterialCatalog MaterialCatalog::from_json_text(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(fmt::format("material catalog is not valid JSON: {}", e.what()));
    }
    if (!doc.is_array()) throw SchemaError("material catalog must be a JSON array of records");

    MaterialCatalog catalog;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& record = doc[i];
        if (!record.is_object() || !record.contains("name") || !record["name"].is_string()) {
            throw SchemaError(fmt::format("material record {}: missing string key 'name'", i + 1), i + 1);
        }
        MaterialParams params{record["name"].get<std::string>(),
                              required_number(record, "a", i),
                              required_number(record, "b", i),
                              required_number(record, "c", i),
                              required_number(record, "d", i),
                              required_number(record, "roughness_m", i)};
        try {
            catalog.add(std::move(params));
        } catch (const DomainError& e) {
            throw SchemaError(fmt::format("material record {}: {}", i + 1, e.what()), i + 1);
        }
    }
    return catalog;
}

MaterialCatalog MaterialCatalog::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError(fmt::format("cannot open material catalog '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string MaterialCatalog::to_json_text() const
{
    auto doc = nlohmann::json::array();
    for (const auto& m : materials_) {
        doc.push_back({{"name", m.name}, {"a", m.a}, {"b", m.b}, {"c", m.c}, {"d", m.d},
                       {"roughness_m", m.roughness_m}});
    }
    return doc.dump(2) + "\n";
}

const MaterialParams& MaterialCatalog::lookup(std::string_view name) const
{
    const auto it = std::find_if(materials_.begin(), materials_.end(),
                                 [&](const MaterialParams& m) { return m.name == name; });
    if (it == materials_.end()) throw NotFoundError(fmt::format("unknown material '{}'", name));
    return *it;
}

bool MaterialCatalog::contains(std::string_view name) const
{
    return std::any_of(materials_.begin(), materials_.end(),
                       [&](const MaterialParams& m) { return m.name == name; });
}

void MaterialCatalog::add(MaterialParams params)
{
    validate(params);
    if (contains(params.name)) throw DomainError(fmt::format("duplicate material '{}'", params.name));
    materials_.push_back(std::move(params));
}

std::vector<std::string> MaterialCatalog::names() const
{
    std::vector<std::string> out;
    out.reserve(materials_.size());
    for (const auto& m : materials_) out.push_back(m.name);
    return out;
}

}  // namespace scatter_sense
