#pragma once

#include "scatter_sense/materials.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scatter_sense {

using MaterialSequence = std::vector<std::string>;

enum class Provenance { computed, imported };

// Single-bounce reflection loss per material on a shared incident-angle grid at one frequency.
// Immutable after construction; all queries are const.
class RlDatabase {
public:
    // Throws DomainError if the grid is not strictly increasing inside [0, 89], a row length
    // does not match the grid, a value is negative or non-finite, or a name repeats.
    RlDatabase(double frequency_ghz, std::vector<double> angle_grid_deg,
               std::vector<std::pair<std::string, std::vector<double>>> rows, Provenance provenance);

    double frequency_ghz() const noexcept { return frequency_ghz_; }
    const std::vector<double>& angle_grid() const noexcept { return angle_grid_; }
    Provenance provenance() const noexcept { return provenance_; }
    std::vector<std::string> materials() const;
    bool contains(std::string_view material) const;
    bool empty() const noexcept { return rows_.empty(); }
    // Throws NotFoundError.
    std::span<const double> row(std::string_view material) const;

    // Largest angle lookup() accepts by default: last grid angle + 10 degrees.
    double default_extrapolation_bound() const;

private:
    double frequency_ghz_;
    std::vector<double> angle_grid_;
    std::vector<std::pair<std::string, std::vector<double>>> rows_;
    Provenance provenance_;
};

RlDatabase generate_db(std::span<const MaterialParams> materials, double f_ghz, std::vector<double> angle_grid_deg);

// CSV: header "material,<angle>,<angle>,..." then one row per material. Frequency is not part
// of the table; callers supply it.
RlDatabase parse_db_csv(std::string_view text, double f_ghz);
RlDatabase import_db(const std::filesystem::path& path, double f_ghz);
std::string to_csv(const RlDatabase& db, int decimals = 6);

// Piecewise-linear on the grid, linear extrapolation past either end of the grid.
// Throws NotFoundError for an unknown material and DomainError outside [0, bound].
double lookup(const RlDatabase& db, std::string_view material, double theta_deg,
              std::optional<double> extrapolation_bound_deg = std::nullopt);

double sum_rl(const RlDatabase& db, std::span<const std::string> sequence, std::span<const double> angles_deg,
              std::optional<double> extrapolation_bound_deg = std::nullopt);

struct SingleBounceMatch {
    std::string material;
    double theta_deg = 0.0;
    double rl_db = 0.0;
};

struct AnglePair {
    double theta1_deg = 0.0;
    double theta2_deg = 0.0;
};

// One connected trace of (theta1, theta2) points for a two-material sequence whose summed
// loss is within tolerance of the target.
struct IsoRlLocus {
    MaterialSequence sequence;
    std::vector<AnglePair> points;
};

struct InverseLookupResult {
    std::vector<SingleBounceMatch> single;
    std::vector<IsoRlLocus> loci;
};

struct InverseLookupOptions {
    double tolerance_db = 0.05;
    double angle_step_deg = 0.1;
    // Scan range upper limit; defaults to min(default_extrapolation_bound, 89.9).
    std::optional<double> max_angle_deg;
};

InverseLookupResult inverse_lookup(const RlDatabase& db, double target_db, int n_bounces,
                                   const InverseLookupOptions& options = {});

// Dense per-material RL sampled on k*step for k*step <= max_angle. Shared by inverse_lookup
// and the method-2 solver.
struct SampledRlTable {
    double step_deg = 0.1;
    std::vector<std::string> materials;
    std::vector<std::vector<double>> values;  // [material][k]
};

SampledRlTable sample_db(const RlDatabase& db, double step_deg, double max_angle_deg);

}  // namespace scatter_sense
