#pragma once

#include "scatter_sense/geometry.hpp"
#include "scatter_sense/rl_db.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scatter_sense {

struct Scene {
    std::vector<PlaneScatterer> scatterers;
    double frequency_ghz = 100.0;
    int max_bounces = 3;

    void validate() const;

    // {"frequency_ghz", "max_bounces", "scatterers": [{"normal": [x,y,z], "offset", "material"}]}
    static Scene from_json_text(std::string_view text);
    static Scene load(const std::filesystem::path& path);
    std::string to_json_text() const;
};

// One sensing observation as seen by the transceivers.
struct Measurement {
    Vec3 tx;
    Vec3 rx;
    Vec3 aod;  // unit departure direction at TX
    Vec3 aoa;  // unit arrival direction at RX (pointing from the last RP toward RX)
    double path_length_m = 0.0;
    double frequency_ghz = 100.0;
    double rl_measured_db = 0.0;
    double rl_uncertainty_db = 0.0;

    void validate() const;

    static Measurement from_json_text(std::string_view text);
    static Measurement load(const std::filesystem::path& path);
    std::string to_json_text() const;
};

struct TracedPath {
    Trajectory trajectory;
    std::vector<std::size_t> scatterer_indices;
    MaterialSequence materials;
};

inline constexpr double kDefaultArrivalTolerance = 1e-3;

// Specular bounce-by-bounce trace toward rx. Nearest plane first (lower scene index on ties);
// after each bounce the path terminates at rx if the outgoing ray passes within arrival_tol
// of it before striking another plane. Absent if rx is not reached within max_bounces.
std::optional<TracedPath> trace(const Scene& scene, const Ray& tx_ray, const Vec3& rx,
                                double arrival_tol = kDefaultArrivalTolerance);

struct SynthesisOptions {
    double noise_sigma_db = 0.0;
    int n_samples = 1;
    std::uint64_t seed = 0;
    double p_tx_dbm = 30.0;
    double arrival_tol = kDefaultArrivalTolerance;
};

// Traces the scene and produces the measurement a transceiver pair would record.
// Absent if the trace does not reach rx.
std::optional<Measurement> synthesize(const Scene& scene, const Ray& tx_ray, const Vec3& rx, const RlDatabase& db,
                                      const SynthesisOptions& options = {});

// Builds the two planes that reflect a two-bounce trajectory onto itself. Each plane passes
// through its RP with normal bisecting the reversed incoming and the outgoing directions.
// Throws DomainError unless the trajectory has two RPs, two materials are given, theta1/theta2
// match the trajectory's incident angles within 0.1 deg, and (for planar trajectories) the
// dihedral angle equals theta1 + theta2 within 0.1 deg.
Scene dihedral_scene(double theta1_deg, double theta2_deg, const Trajectory& trajectory,
                     const MaterialSequence& materials, double frequency_ghz = 100.0);

// Interior wedge angle between two reflecting planes whose normals face the ray, in degrees.
double dihedral_angle(const PlaneScatterer& first, const PlaneScatterer& second);

// Reflecting plane at points[k] of a trajectory (1 <= k <= points.size() - 2).
PlaneScatterer bisector_plane(const Trajectory& trajectory, std::size_t k, std::string material);

}  // namespace scatter_sense
