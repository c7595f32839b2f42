#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scatter_sense {

// ITU-R P.2040 coefficients of one building material plus its RMS surface roughness.
// Permittivity real part is a*f^b, conductivity is c*f^d (f in GHz).
struct MaterialParams {
    std::string name;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double roughness_m = 0.0;
};

// Complex relative permittivity re - j*im. im is stored as a non-negative magnitude.
struct ComplexPermittivity {
    double re = 1.0;
    double im = 0.0;
};

// Throws DomainError when a <= 0, c < 0 or roughness < 0.
void validate(const MaterialParams& params);

// eta = a*f^b - j*17.98*c*f^d/f, f in GHz.
ComplexPermittivity relative_permittivity(const MaterialParams& params, double f_ghz);

class MaterialCatalog {
public:
    MaterialCatalog() = default;
    explicit MaterialCatalog(std::vector<MaterialParams> materials);

    // Wood, plasterboard and glass with the roughness used for the 100 GHz reference tables.
    static MaterialCatalog builtin();

    // JSON array of {"name","a","b","c","d","roughness_m"} records.
    static MaterialCatalog from_json_text(std::string_view text);
    static MaterialCatalog load(const std::filesystem::path& path);
    std::string to_json_text() const;

    // Throws NotFoundError naming the identifier.
    const MaterialParams& lookup(std::string_view name) const;
    bool contains(std::string_view name) const;

    // Adds or rejects a duplicate name with DomainError.
    void add(MaterialParams params);

    const std::vector<MaterialParams>& materials() const noexcept { return materials_; }
    std::vector<std::string> names() const;

private:
    std::vector<MaterialParams> materials_;
};

}  // namespace scatter_sense
