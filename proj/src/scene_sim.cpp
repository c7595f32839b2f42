#include "scatter_sense/scene_sim.hpp"

#include "scatter_sense/csv.hpp"
#include "scatter_sense/error.hpp"
#include "scatter_sense/linkbudget.hpp"
#include "scatter_sense/json_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace scatter_sense {

namespace {

constexpr double kMinAdvance = 1e-6;
constexpr double kTieTolerance = 1e-9;
constexpr double kParallelTolerance = 1e-12;
constexpr double kAngleCheckTolerance = 0.1;

struct Hit {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
};

std::optional<Hit> nearest_hit(const std::vector<PlaneScatterer>& planes, const Vec3& origin, const Vec3& dir)
{
    std::optional<Hit> best;
    for (std::size_t k = 0; k < planes.size(); ++k) {
        const double denom = dot(planes[k].normal, dir);
        if (std::abs(denom) < kParallelTolerance) continue;
        const double t = -planes[k].signed_distance(origin) / denom;
        if (!(t > kMinAdvance)) continue;
        if (!best || t < best->distance - kTieTolerance) best = Hit{k, t};
    }
    return best;
}

double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace

void Scene::validate() const
{
    if (max_bounces < 1) throw DomainError("scene max_bounces must be >= 1");
    if (!(frequency_ghz > 0.0)) throw DomainError("scene frequency must be positive");
    for (const auto& s : scatterers) {
        if (std::abs(norm(s.normal) - 1.0) > 1e-9) throw DomainError("scatterer normal must be unit length");
    }
}

Scene Scene::from_json_text(std::string_view text)
{
    const auto doc = parse_json(text, "scene");
    Scene scene;
    scene.frequency_ghz = json_number(doc, "frequency_ghz");
    scene.max_bounces = static_cast<int>(json_number(doc, "max_bounces"));
    if (!doc.contains("scatterers") || !doc["scatterers"].is_array()) {
        throw SchemaError("scene: 'scatterers' must be an array");
    }
    std::size_t row = 0;
    for (const auto& s : doc["scatterers"]) {
        ++row;
        if (!s.contains("material") || !s["material"].is_string()) {
            throw SchemaError(fmt::format("scene scatterer {}: missing string 'material'", row), row);
        }
        try {
            scene.scatterers.push_back(PlaneScatterer::from_equation(
                json_vec3(s, "normal"), json_number(s, "offset"), s["material"].get<std::string>()));
        } catch (const DomainError& e) {
            throw SchemaError(fmt::format("scene scatterer {}: {}", row, e.what()), row);
        }
    }
    try {
        scene.validate();
    } catch (const DomainError& e) {
        throw SchemaError(fmt::format("scene: {}", e.what()));
    }
    return scene;
}

Scene Scene::load(const std::filesystem::path& path) { return from_json_text(read_text_file(path)); }

std::string Scene::to_json_text() const
{
    nlohmann::json doc{{"frequency_ghz", frequency_ghz}, {"max_bounces", max_bounces}};
    auto list = nlohmann::json::array();
    for (const auto& s : scatterers) {
        list.push_back({{"normal", to_json(s.normal)}, {"offset", s.offset}, {"material", s.material}});
    }
    doc["scatterers"] = std::move(list);
    return doc.dump(2) + "\n";
}

void Measurement::validate() const
{
    if (std::abs(norm(aod) - 1.0) > 1e-9 || std::abs(norm(aoa) - 1.0) > 1e-9) {
        throw DomainError("measurement beam directions must be unit vectors");
    }
    if (!(path_length_m >= distance(tx, rx))) {
        throw DomainError(fmt::format("path length {} m is shorter than the TX-RX distance {} m", path_length_m,
                                      distance(tx, rx)));
    }
    if (!(frequency_ghz > 0.0)) throw DomainError("measurement frequency must be positive");
    if (!(rl_uncertainty_db >= 0.0)) throw DomainError("RL uncertainty must be >= 0");
}

Measurement Measurement::from_json_text(std::string_view text)
{
    const auto doc = parse_json(text, "measurement");
    Measurement m;
    m.tx = json_vec3(doc, "tx");
    m.rx = json_vec3(doc, "rx");
    try {
        m.aod = normalized(json_vec3(doc, "aod"));
        m.aoa = normalized(json_vec3(doc, "aoa"));
    } catch (const DomainError&) {
        throw SchemaError("measurement: beam directions must be non-zero");
    }
    m.path_length_m = json_number(doc, "path_length_m");
    m.frequency_ghz = json_number(doc, "frequency_ghz");
    m.rl_measured_db = json_number(doc, "rl_db");
    m.rl_uncertainty_db = doc.contains("rl_uncertainty_db") ? json_number(doc, "rl_uncertainty_db") : 0.0;
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw SchemaError(fmt::format("measurement: {}", e.what()));
    }
    return m;
}

Measurement Measurement::load(const std::filesystem::path& path) { return from_json_text(read_text_file(path)); }

std::string Measurement::to_json_text() const
{
    const nlohmann::json doc{{"tx", to_json(tx)},
                             {"rx", to_json(rx)},
                             {"aod", to_json(aod)},
                             {"aoa", to_json(aoa)},
                             {"path_length_m", path_length_m},
                             {"frequency_ghz", frequency_ghz},
                             {"rl_db", rl_measured_db},
                             {"rl_uncertainty_db", rl_uncertainty_db}};
    return doc.dump(2) + "\n";
}

std::optional<TracedPath> trace(const Scene& scene, const Ray& tx_ray, const Vec3& rx, double arrival_tol)
{
    scene.validate();
    std::vector<Vec3> points{tx_ray.origin()};
    std::vector<std::size_t> struck;
    Vec3 origin = tx_ray.origin();
    Vec3 dir = tx_ray.direction();

    for (int bounce = 0; bounce < scene.max_bounces; ++bounce) {
        const auto hit = nearest_hit(scene.scatterers, origin, dir);
        if (!hit) return std::nullopt;
        origin = origin + hit->distance * dir;
        dir = normalized(reflect_direction(dir, scene.scatterers[hit->index].normal));
        points.push_back(origin);
        struck.push_back(hit->index);

        const Vec3 to_rx = rx - origin;
        const double along = dot(to_rx, dir);
        if (along <= 0.0 || norm(to_rx - along * dir) > arrival_tol) continue;
        const auto blocker = nearest_hit(scene.scatterers, origin, dir);
        if (blocker && blocker->distance < along) continue;

        points.push_back(rx);
        TracedPath path{build_trajectory(std::move(points)), std::move(struck), {}};
        for (std::size_t idx : path.scatterer_indices) path.materials.push_back(scene.scatterers[idx].material);
        return path;
    }
    return std::nullopt;
}

std::optional<Measurement> synthesize(const Scene& scene, const Ray& tx_ray, const Vec3& rx, const RlDatabase& db,
                                      const SynthesisOptions& options)
{
    if (!(options.noise_sigma_db >= 0.0)) throw DomainError("noise sigma must be >= 0");
    if (options.n_samples < 1) throw DomainError("at least one RSS sample is required");

    const auto path = trace(scene, tx_ray, rx, options.arrival_tol);
    if (!path) return std::nullopt;
    const Trajectory& traj = path->trajectory;
    const double true_rl = sum_rl(db, path->materials, traj.incident_angles_deg);

    Measurement m;
    m.tx = traj.points.front();
    m.rx = traj.points.back();
    m.aod = tx_ray.direction();
    m.aoa = normalized(traj.points.back() - traj.points[traj.points.size() - 2]);
    m.path_length_m = traj.total_length_m;
    m.frequency_ghz = scene.frequency_ghz;

    if (options.noise_sigma_db == 0.0) {
        m.rl_measured_db = true_rl;
        m.rl_uncertainty_db = 0.0;
        return m;
    }

    const double f_mhz = scene.frequency_ghz * 1000.0;
    const double p_rx = options.p_tx_dbm - fspl(f_mhz, traj.total_length_m / 1000.0) - true_rl;
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> noise(0.0, options.noise_sigma_db);
    std::vector<double> samples(static_cast<std::size_t>(options.n_samples));
    for (auto& s : samples) s = p_rx + noise(rng);

    const auto rss = aggregate_rss(samples);
    m.rl_measured_db = rl_from_powers({options.p_tx_dbm, rss.mean_dbm, f_mhz, traj.total_length_m}).rl_db;
    m.rl_uncertainty_db = rss.stderr_db.value_or(0.0);
    return m;
}

PlaneScatterer bisector_plane(const Trajectory& trajectory, std::size_t k, std::string material)
{
    if (k == 0 || k + 1 >= trajectory.points.size()) throw DomainError("bisector plane needs an interior point");
    const Vec3& rp = trajectory.points[k];
    const Vec3 back = normalized(trajectory.points[k - 1] - rp);
    const Vec3 ahead = normalized(trajectory.points[k + 1] - rp);
    return PlaneScatterer::through_point(back + ahead, rp, std::move(material));
}

double dihedral_angle(const PlaneScatterer& first, const PlaneScatterer& second)
{
    const double c = std::clamp(dot(first.normal, second.normal), -1.0, 1.0);
    return 180.0 - degrees(std::acos(c));
}

Scene dihedral_scene(double theta1_deg, double theta2_deg, const Trajectory& trajectory,
                     const MaterialSequence& materials, double frequency_ghz)
{
    if (trajectory.bounce_count() != 2) {
        throw DomainError(fmt::format("dihedral scene needs a two-bounce trajectory, got {} bounces",
                                      trajectory.bounce_count()));
    }
    if (materials.size() != 2) {
        throw DomainError(fmt::format("dihedral scene needs two materials, got {}", materials.size()));
    }
    const auto& angles = trajectory.incident_angles_deg;
    if (std::abs(angles[0] - theta1_deg) > kAngleCheckTolerance ||
        std::abs(angles[1] - theta2_deg) > kAngleCheckTolerance) {
        throw DomainError(fmt::format("incident angles ({:.3f}, {:.3f}) do not match trajectory ({:.3f}, {:.3f})",
                                      theta1_deg, theta2_deg, angles[0], angles[1]));
    }

    Scene scene;
    scene.frequency_ghz = frequency_ghz;
    scene.max_bounces = 2;
    scene.scatterers = {bisector_plane(trajectory, 1, materials[0]), bisector_plane(trajectory, 2, materials[1])};

    const auto& p = trajectory.points;
    const Vec3 plane_normal = cross(p[1] - p[0], p[2] - p[0]);
    const bool planar = norm(plane_normal) > 0.0 &&
                        std::abs(dot(normalized(plane_normal), p[3] - p[0])) < 1e-9 * (1.0 + trajectory.total_length_m);
    if (planar) {
        const double wedge = dihedral_angle(scene.scatterers[0], scene.scatterers[1]);
        if (std::abs(wedge - (theta1_deg + theta2_deg)) > kAngleCheckTolerance) {
            throw DomainError(fmt::format("dihedral angle {:.3f} deg differs from theta1 + theta2 = {:.3f} deg", wedge,
                                          theta1_deg + theta2_deg));
        }
    }
    return scene;
}

}  // namespace scatter_sense
