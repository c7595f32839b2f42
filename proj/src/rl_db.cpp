#include "scatter_sense/rl_db.hpp"

#include "scatter_sense/csv.hpp"
#include "scatter_sense/error.hpp"
#include "scatter_sense/fresnel.hpp"
#include "scatter_sense/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace scatter_sense {

namespace {

constexpr double kMaxGridAngle = 89.0;
constexpr double kExtrapolationMargin = 10.0;
constexpr double kScanCeiling = 89.9;

void check_grid(const std::vector<double>& grid)
{
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k]) || grid[k] < 0.0 || grid[k] > kMaxGridAngle) {
            throw DomainError(fmt::format("grid angle {} outside [0, {}]", grid[k], kMaxGridAngle));
        }
        if (k > 0 && !(grid[k] > grid[k - 1])) {
            throw DomainError(fmt::format("angle grid not strictly increasing at position {}", k + 1));
        }
    }
}

double interpolate(std::span<const double> grid, std::span<const double> values, double theta)
{
    if (grid.size() == 1) return values[0];
    // Segment index: clamp to the first/last segment so out-of-grid angles extrapolate linearly.
    const auto upper = std::upper_bound(grid.begin(), grid.end(), theta);
    std::size_t hi = static_cast<std::size_t>(upper - grid.begin());
    hi = std::clamp<std::size_t>(hi, 1, grid.size() - 1);
    const std::size_t lo = hi - 1;
    if (theta == grid[hi]) return values[hi];
    if (theta == grid[lo]) return values[lo];
    const double frac = (theta - grid[lo]) / (grid[hi] - grid[lo]);
    return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

RlDatabase::RlDatabase(double frequency_ghz, std::vector<double> angle_grid_deg,
                       std::vector<std::pair<std::string, std::vector<double>>> rows, Provenance provenance)
    : frequency_ghz_(frequency_ghz),
      angle_grid_(std::move(angle_grid_deg)),
      rows_(std::move(rows)),
      provenance_(provenance)
{
    if (!(frequency_ghz_ > 0.0)) throw DomainError("database frequency must be positive");
    if (angle_grid_.empty()) throw DomainError("angle grid must not be empty");
    check_grid(angle_grid_);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto& [name, values] = rows_[r];
        if (values.size() != angle_grid_.size()) {
            throw DomainError(fmt::format("material '{}' has {} values for {} grid angles", name, values.size(),
                                          angle_grid_.size()));
        }
        for (double v : values) {
            if (!std::isfinite(v) || v < 0.0) {
                throw DomainError(fmt::format("material '{}' has invalid reflection loss {}", name, v));
            }
        }
        for (std::size_t q = 0; q < r; ++q) {
            if (rows_[q].first == name) throw DomainError(fmt::format("duplicate material '{}'", name));
        }
    }
}

std::vector<std::string> RlDatabase::materials() const
{
    std::vector<std::string> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) out.push_back(row.first);
    return out;
}

bool RlDatabase::contains(std::string_view material) const
{
    return std::any_of(rows_.begin(), rows_.end(), [&](const auto& row) { return row.first == material; });
}

std::span<const double> RlDatabase::row(std::string_view material) const
{
    for (const auto& r : rows_) {
        if (r.first == material) return r.second;
    }
    throw NotFoundError(fmt::format("material '{}' not in RL database", material));
}

double RlDatabase::default_extrapolation_bound() const { return angle_grid_.back() + kExtrapolationMargin; }

RlDatabase generate_db(std::span<const MaterialParams> materials, double f_ghz, std::vector<double> angle_grid_deg)
{
    check_grid(angle_grid_deg);
    const std::size_t cols = angle_grid_deg.size();
    std::vector<double> cells(materials.size() * cols);
    parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            cells[idx] = reflection_loss(materials[idx / cols], angle_grid_deg[idx % cols], f_ghz);
        }
    });

    std::vector<std::pair<std::string, std::vector<double>>> rows;
    rows.reserve(materials.size());
    for (std::size_t m = 0; m < materials.size(); ++m) {
        rows.emplace_back(materials[m].name, std::vector<double>(cells.begin() + static_cast<std::ptrdiff_t>(m * cols),
                                                                 cells.begin() + static_cast<std::ptrdiff_t>((m + 1) * cols)));
    }
    return RlDatabase(f_ghz, std::move(angle_grid_deg), std::move(rows), Provenance::computed);
}

RlDatabase parse_db_csv(std::string_view text, double f_ghz)
{
    const auto table = parse_csv(text);
    if (table.empty()) throw SchemaError("RL database file is empty", 1);

    const auto& header = table.front();
    if (header.empty() || header[0] != "material") {
        throw SchemaError("first header cell must be 'material'", 1, 1);
    }
    if (header.size() < 2) throw SchemaError("header has no angle columns", 1, 2);

    std::vector<double> grid;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto angle = parse_double(header[c]);
        if (!angle) throw SchemaError(fmt::format("header cell '{}' is not an angle", header[c]), 1, c + 1);
        if (*angle < 0.0 || *angle > kMaxGridAngle) {
            throw SchemaError(fmt::format("header angle {} outside [0, {}]", *angle, kMaxGridAngle), 1, c + 1);
        }
        if (!grid.empty() && !(*angle > grid.back())) {
            throw SchemaError("angle header is not strictly increasing", 1, c + 1);
        }
        grid.push_back(*angle);
    }

    std::vector<std::pair<std::string, std::vector<double>>> rows;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& cells = table[r];
        if (cells.size() != header.size()) {
            throw SchemaError(fmt::format("row has {} cells, header has {}", cells.size(), header.size()), r + 1);
        }
        if (cells[0].empty()) throw SchemaError("empty material name", r + 1, 1);
        for (const auto& existing : rows) {
            if (existing.first == cells[0]) {
                throw SchemaError(fmt::format("duplicate material '{}'", cells[0]), r + 1, 1);
            }
        }
        std::vector<double> values;
        values.reserve(grid.size());
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto v = parse_double(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw SchemaError(fmt::format("cell '{}' is not a number", cells[c]), r + 1, c + 1);
            }
            if (*v < 0.0) throw SchemaError(fmt::format("negative reflection loss {}", *v), r + 1, c + 1);
            values.push_back(*v);
        }
        rows.emplace_back(cells[0], std::move(values));
    }
    return RlDatabase(f_ghz, std::move(grid), std::move(rows), Provenance::imported);
}

RlDatabase import_db(const std::filesystem::path& path, double f_ghz)
{
    std::ifstream in(path);
    if (!in) throw NotFoundError(fmt::format("cannot open RL database '{}'", path.string()));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_db_csv(buffer.str(), f_ghz);
}

std::string to_csv(const RlDatabase& db, int decimals)
{
    std::string out = "material";
    for (double a : db.angle_grid()) out += fmt::format(",{}", a);
    out += '\n';
    for (const auto& name : db.materials()) {
        out += name;
        for (double v : db.row(name)) out += fmt::format(",{:.{}f}", v, decimals);
        out += '\n';
    }
    return out;
}

double lookup(const RlDatabase& db, std::string_view material, double theta_deg,
              std::optional<double> extrapolation_bound_deg)
{
    const auto values = db.row(material);
    const double bound = extrapolation_bound_deg.value_or(db.default_extrapolation_bound());
    if (!(theta_deg >= 0.0) || theta_deg > bound) {
        throw DomainError(fmt::format("incident angle {} outside lookup range [0, {}]", theta_deg, bound));
    }
    return interpolate(db.angle_grid(), values, theta_deg);
}

double sum_rl(const RlDatabase& db, std::span<const std::string> sequence, std::span<const double> angles_deg,
              std::optional<double> extrapolation_bound_deg)
{
    if (sequence.size() != angles_deg.size()) {
        throw DomainError(fmt::format("{} materials but {} incident angles", sequence.size(), angles_deg.size()));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < sequence.size(); ++k) {
        total += lookup(db, sequence[k], angles_deg[k], extrapolation_bound_deg);
    }
    return total;
}

SampledRlTable sample_db(const RlDatabase& db, double step_deg, double max_angle_deg)
{
    if (!(step_deg > 0.0)) throw DomainError("angle step must be positive");
    SampledRlTable table;
    table.step_deg = step_deg;
    table.materials = db.materials();
    const auto count = static_cast<std::size_t>(std::floor(max_angle_deg / step_deg + 1e-9)) + 1;
    for (const auto& name : table.materials) {
        const auto row = db.row(name);
        std::vector<double> values(count);
        for (std::size_t k = 0; k < count; ++k) {
            values[k] = interpolate(db.angle_grid(), row, static_cast<double>(k) * step_deg);
        }
        table.values.push_back(std::move(values));
    }
    return table;
}

InverseLookupResult inverse_lookup(const RlDatabase& db, double target_db, int n_bounces,
                                   const InverseLookupOptions& options)
{
    if (!(options.tolerance_db > 0.0)) throw DomainError("inverse lookup tolerance must be positive");
    if (!(options.angle_step_deg > 0.0)) throw DomainError("inverse lookup angle step must be positive");
    if (n_bounces != 1 && n_bounces != 2) throw DomainError("inverse lookup supports one or two bounces");

    const double max_angle =
        options.max_angle_deg.value_or(std::min(db.default_extrapolation_bound(), kScanCeiling));
    const auto table = sample_db(db, options.angle_step_deg, max_angle);
    const double step = options.angle_step_deg;
    InverseLookupResult result;

    if (n_bounces == 1) {
        for (std::size_t m = 0; m < table.materials.size(); ++m) {
            const auto& values = table.values[m];
            for (std::size_t k = 0; k < values.size(); ++k) {
                if (std::abs(values[k] - target_db) <= options.tolerance_db) {
                    result.single.push_back({table.materials[m], static_cast<double>(k) * step, values[k]});
                }
            }
        }
        return result;
    }

    for (std::size_t m1 = 0; m1 < table.materials.size(); ++m1) {
        for (std::size_t m2 = 0; m2 < table.materials.size(); ++m2) {
            const auto& first = table.values[m1];
            const auto& second = table.values[m2];
            const std::size_t n = first.size();
            std::vector<char> hit(n * n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    hit[i * n + j] = std::abs(first[i] + second[j] - target_db) <= options.tolerance_db;
                }
            }
            // 8-connected components in row-major discovery order.
            for (std::size_t seed = 0; seed < hit.size(); ++seed) {
                if (hit[seed] != 1) continue;
                IsoRlLocus locus{{table.materials[m1], table.materials[m2]}, {}};
                std::vector<std::size_t> cells;
                std::deque<std::size_t> frontier{seed};
                hit[seed] = 2;
                while (!frontier.empty()) {
                    const std::size_t cell = frontier.front();
                    frontier.pop_front();
                    cells.push_back(cell);
                    const auto ci = static_cast<std::ptrdiff_t>(cell / n);
                    const auto cj = static_cast<std::ptrdiff_t>(cell % n);
                    for (std::ptrdiff_t di = -1; di <= 1; ++di) {
                        for (std::ptrdiff_t dj = -1; dj <= 1; ++dj) {
                            const auto ni = ci + di;
                            const auto nj = cj + dj;
                            if (ni < 0 || nj < 0 || ni >= static_cast<std::ptrdiff_t>(n) ||
                                nj >= static_cast<std::ptrdiff_t>(n)) {
                                continue;
                            }
                            const auto next = static_cast<std::size_t>(ni) * n + static_cast<std::size_t>(nj);
                            if (hit[next] == 1) {
                                hit[next] = 2;
                                frontier.push_back(next);
                            }
                        }
                    }
                }
                std::sort(cells.begin(), cells.end());
                locus.points.reserve(cells.size());
                for (std::size_t cell : cells) {
                    locus.points.push_back({static_cast<double>(cell / n) * step, static_cast<double>(cell % n) * step});
                }
                result.loci.push_back(std::move(locus));
            }
        }
    }
    return result;
}

}  // namespace scatter_sense
