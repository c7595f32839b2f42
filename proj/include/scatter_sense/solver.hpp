#pragma once

#include "scatter_sense/geometry.hpp"
#include "scatter_sense/rl_db.hpp"
#include "scatter_sense/scene_sim.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scatter_sense {

struct SolverConfig {
    double delta_d_m = 0.02;                // beam sampling step
    double path_tol_m = 0.02;               // |trajectory length - measured length|
    double rl_tol_db = 0.1;                 // floor of the RL matching tolerance
    double angle_step_deg = 0.1;            // iso-RL scan resolution (method 2)
    double max_path_m = 200.0;              // enumeration bound
    double extrapolation_bound_deg = 90.0;  // largest incident angle scored against the database
    double coplanar_tolerance = kDefaultCoplanarTolerance;

    // All strictly positive and path_tol >= delta_d / 2; throws DomainError otherwise.
    void validate() const;
};

// One hypothesised explanation of a measurement.
struct CandidateSolution {
    Trajectory trajectory;
    MaterialSequence materials;
    double sum_rl_db = 0.0;
    double rl_residual_db = 0.0;   // sum_rl - measured
    double path_residual_m = 0.0;  // trajectory length - measured
};

struct TaggedPoint {
    Vec3 position;
    std::string material;
};

// (P_i, Q_j) with P_i = TX + i*dd*aod on the departure beam and Q_j = RX - j*dd*aoa on the
// arrival beam traced backwards.
struct PairSample {
    std::size_t i = 0;
    std::size_t j = 0;
    Vec3 rp1;
    Vec3 rp2;
    double path_length_m = 0.0;
    double path_residual_m = 0.0;
};

// Contiguous (8-connected in (i, j)) run of path-matched samples.
struct PairCluster {
    PairSample representative;  // minimum |path_residual|
    std::vector<PairSample> members;
};

Trajectory to_trajectory(const Measurement& m, const PairSample& pair);

std::vector<PairCluster> enumerate_pairs(const Measurement& m, const SolverConfig& cfg);

// Source of summed reflection loss for a hypothesised (material sequence, trajectory).
class RlScorer {
public:
    virtual ~RlScorer() = default;
    // Absent when the hypothesis cannot be scored (angle out of range, no table row).
    virtual std::optional<double> score(const MaterialSequence& sequence, const Trajectory& trajectory) const = 0;
    virtual std::vector<std::string> materials() const = 0;
};

// Interpolated database lookup at the trajectory's incident angles.
class DatabaseScorer final : public RlScorer {
public:
    DatabaseScorer(const RlDatabase& db, double extrapolation_bound_deg);
    std::optional<double> score(const MaterialSequence& sequence, const Trajectory& trajectory) const override;
    std::vector<std::string> materials() const override { return db_.materials(); }

private:
    const RlDatabase& db_;
    double bound_;
};

// Precomputed per-trajectory losses (the layout of the shipped table3.csv). A trajectory is
// scored by a row whose RPs both lie within match_radius of the trajectory's RPs.
class TrajectoryRlTable final : public RlScorer {
public:
    struct Row {
        std::string trajectory;
        Vec3 rp1;
        Vec3 rp2;
        double theta1_deg = 0.0;
        double theta2_deg = 0.0;
        MaterialSequence materials;
        double rl1_db = 0.0;
        double rl2_db = 0.0;
        double sum_rl_db = 0.0;
    };

    explicit TrajectoryRlTable(std::vector<Row> rows, double match_radius_m = 0.1);
    static TrajectoryRlTable parse(std::string_view csv_text, double match_radius_m = 0.1);
    static TrajectoryRlTable load(const std::filesystem::path& path, double match_radius_m = 0.1);

    std::optional<double> score(const MaterialSequence& sequence, const Trajectory& trajectory) const override;
    std::vector<std::string> materials() const override;
    const std::vector<Row>& rows() const noexcept { return rows_; }

private:
    std::vector<Row> rows_;
    double match_radius_;
};

enum class SolveStatus { ok, no_path_match, no_rl_match };
std::string_view to_string(SolveStatus status);

struct SolveResult {
    std::vector<CandidateSolution> candidates;  // ranked, best first
    SolveStatus status = SolveStatus::ok;
};

// Path-length matching, then RL matching against every ordered material sequence.
SolveResult method1(const Measurement& m, const RlScorer& scorer, const SolverConfig& cfg);
SolveResult method1(const Measurement& m, const RlDatabase& db, const SolverConfig& cfg);

// A star point (sampled P_i, Q_j) whose angles fall on an iso-RL locus, before path filtering.
struct IsoRlMatch {
    PairSample pair;
    MaterialSequence materials;
    double theta1_deg = 0.0;
    double theta2_deg = 0.0;
    double sum_rl_db = 0.0;
    double rl_residual_db = 0.0;
};

struct Method2Result {
    SolveResult result;
    std::vector<IsoRlMatch> pre_length;  // filled only when requested
};

// RL matching (iso-RL loci) first, then path-length matching.
Method2Result method2(const Measurement& m, const RlDatabase& db, const SolverConfig& cfg,
                      bool keep_pre_length = false);

// One point per RP in candidate rank order.
std::vector<TaggedPoint> export_points(std::span<const CandidateSolution> candidates);

std::string candidates_to_csv(std::span<const CandidateSolution> candidates);
std::string candidates_to_json(std::span<const CandidateSolution> candidates);
std::vector<CandidateSolution> candidates_from_json(std::string_view text);
std::string points_to_csv(std::span<const TaggedPoint> points);
std::vector<TaggedPoint> parse_points_csv(std::string_view text);
// RPs of a candidate CSV (as written by candidates_to_csv) in rank order.
std::vector<TaggedPoint> points_from_candidates_csv(std::string_view text);

}  // namespace scatter_sense
