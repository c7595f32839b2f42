#include "scatter_sense/solver.hpp"

#include "scatter_sense/csv.hpp"
#include "scatter_sense/error.hpp"
#include "scatter_sense/json_io.hpp"
#include "scatter_sense/parallel.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <tuple>

namespace scatter_sense {

namespace {

constexpr double kScanCeiling = 89.9;

// Grid cell of a match: material-sequence index plus beam sample indices.
struct GridKey {
    std::size_t seq = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    auto operator<=>(const GridKey&) const = default;
};

// Groups keys into 8-connected components per sequence. Components are ordered by their
// smallest key; member indices refer to the input span.
std::vector<std::vector<std::size_t>> cluster_keys(std::span<const GridKey> keys)
{
    std::map<GridKey, std::size_t> index;
    for (std::size_t k = 0; k < keys.size(); ++k) index.emplace(keys[k], k);

    std::vector<char> seen(keys.size(), 0);
    std::vector<std::vector<std::size_t>> clusters;
    for (const auto& [start_key, start] : index) {
        if (seen[start]) continue;
        std::vector<std::size_t> members;
        std::deque<std::size_t> frontier{start};
        seen[start] = 1;
        while (!frontier.empty()) {
            const std::size_t cur = frontier.front();
            frontier.pop_front();
            members.push_back(cur);
            const GridKey& key = keys[cur];
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di < 0 && key.i == 0) || (dj < 0 && key.j == 0)) continue;
                    const GridKey next{key.seq, key.i + static_cast<std::size_t>(di),
                                       key.j + static_cast<std::size_t>(dj)};
                    const auto it = index.find(next);
                    if (it != index.end() && !seen[it->second]) {
                        seen[it->second] = 1;
                        frontier.push_back(it->second);
                    }
                }
            }
        }
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
        clusters.push_back(std::move(members));
    }
    return clusters;
}

std::vector<MaterialSequence> ordered_pairs(const std::vector<std::string>& materials)
{
    std::vector<MaterialSequence> out;
    for (const auto& a : materials) {
        for (const auto& b : materials) out.push_back({a, b});
    }
    return out;
}

double effective_rl_tol(const Measurement& m, const SolverConfig& cfg)
{
    return std::max(cfg.rl_tol_db, m.rl_uncertainty_db);
}

void rank_by_rl(std::vector<CandidateSolution>& c)
{
    std::stable_sort(c.begin(), c.end(), [](const CandidateSolution& a, const CandidateSolution& b) {
        return std::make_tuple(std::abs(a.rl_residual_db), std::abs(a.path_residual_m)) <
               std::make_tuple(std::abs(b.rl_residual_db), std::abs(b.path_residual_m));
    });
}

void rank_by_path(std::vector<CandidateSolution>& c)
{
    std::stable_sort(c.begin(), c.end(), [](const CandidateSolution& a, const CandidateSolution& b) {
        return std::make_tuple(std::abs(a.path_residual_m), std::abs(a.rl_residual_db)) <
               std::make_tuple(std::abs(b.path_residual_m), std::abs(b.rl_residual_db));
    });
}

// Single-bounce hypotheses when the beams meet at a point whose path length matches.
std::optional<std::vector<CandidateSolution>> single_bounce_candidates(const Measurement& m,
                                                                       const RlScorer& scorer,
                                                                       const SolverConfig& cfg)
{
    const auto rp = single_bounce_rp(Ray(m.tx, m.aod), Ray(m.rx, m.aoa), cfg.coplanar_tolerance);
    if (!rp) return std::nullopt;
    const Trajectory traj = build_trajectory({m.tx, *rp, m.rx});
    const double path_residual = traj.total_length_m - m.path_length_m;
    if (std::abs(path_residual) > cfg.path_tol_m) return std::nullopt;

    const double tol = effective_rl_tol(m, cfg);
    std::vector<CandidateSolution> out;
    for (const auto& material : scorer.materials()) {
        const MaterialSequence seq{material};
        const auto rl = scorer.score(seq, traj);
        if (!rl) continue;
        const double residual = *rl - m.rl_measured_db;
        if (std::abs(residual) <= tol) out.push_back({traj, seq, *rl, residual, path_residual});
    }
    return out;
}

struct Sampling {
    Vec3 tx;
    Vec3 rx;
    Vec3 tx_dir;
    Vec3 rx_back;  // reversed arrival direction
    double step;

    Vec3 p(std::size_t i) const { return tx + (static_cast<double>(i) * step) * tx_dir; }
    Vec3 q(std::size_t j) const { return rx + (static_cast<double>(j) * step) * rx_back; }
};

Sampling make_sampling(const Measurement& m, const SolverConfig& cfg)
{
    return {m.tx, m.rx, normalized(m.aod), -normalized(m.aoa), cfg.delta_d_m};
}

PairSample make_pair(const Sampling& s, std::size_t i, std::size_t j, double target)
{
    const Vec3 p = s.p(i);
    const Vec3 q = s.q(j);
    const double len = distance(s.tx, p) + distance(p, q) + distance(q, s.rx);
    return {i, j, p, q, len, len - target};
}

std::size_t sample_count(double range, double step)
{
    return static_cast<std::size_t>(std::floor(range / step + 1e-9));
}

}  // namespace

void SolverConfig::validate() const
{
    const double fields[] = {delta_d_m, path_tol_m, rl_tol_db, angle_step_deg, max_path_m, extrapolation_bound_deg,
                             coplanar_tolerance};
    for (double f : fields) {
        if (!(f > 0.0)) throw DomainError("solver configuration values must be strictly positive");
    }
    if (path_tol_m < 0.5 * delta_d_m) {
        throw DomainError(fmt::format("path tolerance {} m is below half the sampling step {} m", path_tol_m, delta_d_m));
    }
}

Trajectory to_trajectory(const Measurement& m, const PairSample& pair)
{
    return build_trajectory({m.tx, pair.rp1, pair.rp2, m.rx});
}

std::vector<PairCluster> enumerate_pairs(const Measurement& m, const SolverConfig& cfg)
{
    cfg.validate();
    const Sampling s = make_sampling(m, cfg);
    const double target = m.path_length_m;
    const double reach = std::min(target + cfg.path_tol_m, cfg.max_path_m);
    const std::size_t n_p = sample_count(reach, cfg.delta_d_m);

    std::vector<std::vector<PairSample>> per_i(n_p + 1);
    parallel_for(n_p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin + 1; i <= end; ++i) {
            const double s_len = static_cast<double>(i) * cfg.delta_d_m;
            // Triangle inequality: the path through P_i is at least |TP_i| + |P_i R|.
            if (s_len + distance(s.p(i), s.rx) > reach) continue;
            const std::size_t n_q = sample_count(reach - s_len, cfg.delta_d_m);
            for (std::size_t j = 1; j <= n_q; ++j) {
                const PairSample pair = make_pair(s, i, j, target);
                if (std::abs(pair.path_residual_m) <= cfg.path_tol_m && pair.path_length_m <= cfg.max_path_m) {
                    per_i[i].push_back(pair);
                }
            }
        }
    });

    std::vector<PairSample> matches;
    for (auto& v : per_i) matches.insert(matches.end(), v.begin(), v.end());
    std::vector<GridKey> keys;
    keys.reserve(matches.size());
    for (const auto& p : matches) keys.push_back({0, p.i, p.j});

    std::vector<PairCluster> clusters;
    for (const auto& members : cluster_keys(keys)) {
        PairCluster cluster;
        for (std::size_t idx : members) cluster.members.push_back(matches[idx]);
        cluster.representative = *std::min_element(
            cluster.members.begin(), cluster.members.end(), [](const PairSample& a, const PairSample& b) {
                return std::abs(a.path_residual_m) < std::abs(b.path_residual_m);
            });
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

DatabaseScorer::DatabaseScorer(const RlDatabase& db, double extrapolation_bound_deg)
    : db_(db), bound_(extrapolation_bound_deg)
{
}

std::optional<double> DatabaseScorer::score(const MaterialSequence& sequence, const Trajectory& trajectory) const
{
    const auto& angles = trajectory.incident_angles_deg;
    if (angles.size() != sequence.size()) return std::nullopt;
    for (double a : angles) {
        if (a > bound_) return std::nullopt;
    }
    return sum_rl(db_, sequence, angles, bound_);
}

TrajectoryRlTable::TrajectoryRlTable(std::vector<Row> rows, double match_radius_m)
    : rows_(std::move(rows)), match_radius_(match_radius_m)
{
    if (!(match_radius_ > 0.0)) throw DomainError("match radius must be positive");
}

TrajectoryRlTable TrajectoryRlTable::parse(std::string_view csv_text, double match_radius_m)
{
    static constexpr std::string_view kHeader[] = {"trajectory", "rp1_x", "rp1_y", "rp1_z", "rp2_x",
                                                   "rp2_y", "rp2_z", "theta1_deg", "theta2_deg", "material1",
                                                   "material2", "rl1_db", "rl2_db", "sum_rl_db"};
    const auto table = parse_csv(csv_text);
    if (table.empty()) throw SchemaError("trajectory RL table is empty", 1);
    const auto& header = table.front();
    if (header.size() != std::size(kHeader)) throw SchemaError("trajectory RL table header has wrong width", 1);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] != kHeader[c]) {
            throw SchemaError(fmt::format("expected header '{}', found '{}'", kHeader[c], header[c]), 1, c + 1);
        }
    }

    std::vector<Row> rows;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& cells = table[r];
        if (cells.size() != header.size()) throw SchemaError("row width differs from header", r + 1);
        auto num = [&](std::size_t c) {
            const auto v = parse_double(cells[c]);
            if (!v) throw SchemaError(fmt::format("cell '{}' is not a number", cells[c]), r + 1, c + 1);
            return *v;
        };
        rows.push_back({cells[0], {num(1), num(2), num(3)}, {num(4), num(5), num(6)}, num(7), num(8),
                        {cells[9], cells[10]}, num(11), num(12), num(13)});
    }
    return TrajectoryRlTable(std::move(rows), match_radius_m);
}

TrajectoryRlTable TrajectoryRlTable::load(const std::filesystem::path& path, double match_radius_m)
{
    return parse(read_text_file(path), match_radius_m);
}

std::optional<double> TrajectoryRlTable::score(const MaterialSequence& sequence, const Trajectory& trajectory) const
{
    if (trajectory.bounce_count() != 2 || sequence.size() != 2) return std::nullopt;
    const auto rps = trajectory.reflection_points();
    for (const auto& row : rows_) {
        if (row.materials == sequence && distance(row.rp1, rps[0]) <= match_radius_ &&
            distance(row.rp2, rps[1]) <= match_radius_) {
            return row.sum_rl_db;
        }
    }
    return std::nullopt;
}

std::vector<std::string> TrajectoryRlTable::materials() const
{
    std::vector<std::string> out;
    for (const auto& row : rows_) {
        for (const auto& name : row.materials) {
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
        }
    }
    return out;
}

std::string_view to_string(SolveStatus status)
{
    switch (status) {
    case SolveStatus::ok: return "ok";
    case SolveStatus::no_path_match: return "no-path-match";
    case SolveStatus::no_rl_match: return "no-rl-match";
    }
    return "unknown";
}

SolveResult method1(const Measurement& m, const RlScorer& scorer, const SolverConfig& cfg)
{
    cfg.validate();
    m.validate();
    if (auto single = single_bounce_candidates(m, scorer, cfg); single && !single->empty()) {
        rank_by_rl(*single);
        return {std::move(*single), SolveStatus::ok};
    }

    std::vector<PairSample> pairs;
    for (auto& cluster : enumerate_pairs(m, cfg)) {
        pairs.insert(pairs.end(), cluster.members.begin(), cluster.members.end());
    }
    if (pairs.empty()) return {{}, SolveStatus::no_path_match};

    const auto sequences = ordered_pairs(scorer.materials());
    const double tol = effective_rl_tol(m, cfg);

    struct Match {
        GridKey key;
        double sum_rl;
        double residual;
    };
    std::vector<std::vector<Match>> per_pair(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const Trajectory traj = to_trajectory(m, pairs[k]);
            for (std::size_t sq = 0; sq < sequences.size(); ++sq) {
                const auto rl = scorer.score(sequences[sq], traj);
                if (!rl) continue;
                const double residual = *rl - m.rl_measured_db;
                if (std::abs(residual) <= tol) per_pair[k].push_back({{sq, pairs[k].i, pairs[k].j}, *rl, residual});
            }
        }
    });

    std::vector<Match> matches;
    std::vector<std::size_t> pair_of;
    for (std::size_t k = 0; k < per_pair.size(); ++k) {
        for (const auto& match : per_pair[k]) {
            matches.push_back(match);
            pair_of.push_back(k);
        }
    }
    if (matches.empty()) return {{}, SolveStatus::no_rl_match};

    std::vector<GridKey> keys;
    keys.reserve(matches.size());
    for (const auto& match : matches) keys.push_back(match.key);

    SolveResult out;
    for (const auto& members : cluster_keys(keys)) {
        const std::size_t best = *std::min_element(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return std::make_tuple(std::abs(matches[a].residual), std::abs(pairs[pair_of[a]].path_residual_m)) <
                   std::make_tuple(std::abs(matches[b].residual), std::abs(pairs[pair_of[b]].path_residual_m));
        });
        const PairSample& pair = pairs[pair_of[best]];
        out.candidates.push_back({to_trajectory(m, pair), sequences[matches[best].key.seq], matches[best].sum_rl,
                                  matches[best].residual, pair.path_residual_m});
    }
    rank_by_rl(out.candidates);
    return out;
}

SolveResult method1(const Measurement& m, const RlDatabase& db, const SolverConfig& cfg)
{
    return method1(m, DatabaseScorer(db, cfg.extrapolation_bound_deg), cfg);
}

Method2Result method2(const Measurement& m, const RlDatabase& db, const SolverConfig& cfg, bool keep_pre_length)
{
    cfg.validate();
    m.validate();
    const DatabaseScorer scorer(db, cfg.extrapolation_bound_deg);
    if (auto single = single_bounce_candidates(m, scorer, cfg); single && !single->empty()) {
        rank_by_path(*single);
        return {{std::move(*single), SolveStatus::ok}, {}};
    }

    const double tol = effective_rl_tol(m, cfg);
    const double max_angle = std::min(cfg.extrapolation_bound_deg, kScanCeiling);
    const double step = cfg.angle_step_deg;

    // Step 3: iso-RL loci rasterised per ordered material pair.
    const auto materials = db.materials();
    const auto sequences = ordered_pairs(materials);
    const auto loci = inverse_lookup(db, m.rl_measured_db, 2, {tol, step, max_angle}).loci;
    if (loci.empty()) return {{{}, SolveStatus::no_rl_match}, {}};

    const std::size_t n_cells = sample_count(max_angle, step) + 1;
    std::vector<std::vector<char>> raster(sequences.size());
    for (const auto& locus : loci) {
        const auto it = std::find(sequences.begin(), sequences.end(), locus.sequence);
        auto& cells = raster[static_cast<std::size_t>(it - sequences.begin())];
        if (cells.empty()) cells.assign(n_cells * n_cells, 0);
        for (const auto& pt : locus.points) {
            const auto a = static_cast<std::size_t>(std::lround(pt.theta1_deg / step));
            const auto b = static_cast<std::size_t>(std::lround(pt.theta2_deg / step));
            cells[a * n_cells + b] = 1;
        }
    }
    auto on_locus = [&](const std::vector<char>& cells, double t1, double t2) {
        const auto lo1 = static_cast<std::ptrdiff_t>(std::ceil(t1 / step - 1.0 - 1e-9));
        const auto hi1 = static_cast<std::ptrdiff_t>(std::floor(t1 / step + 1.0 + 1e-9));
        const auto lo2 = static_cast<std::ptrdiff_t>(std::ceil(t2 / step - 1.0 - 1e-9));
        const auto hi2 = static_cast<std::ptrdiff_t>(std::floor(t2 / step + 1.0 + 1e-9));
        const auto limit = static_cast<std::ptrdiff_t>(n_cells) - 1;
        for (auto a = std::max<std::ptrdiff_t>(lo1, 0); a <= std::min(hi1, limit); ++a) {
            for (auto b = std::max<std::ptrdiff_t>(lo2, 0); b <= std::min(hi2, limit); ++b) {
                if (cells[static_cast<std::size_t>(a) * n_cells + static_cast<std::size_t>(b)]) return true;
            }
        }
        return false;
    };

    // Step 4: star points from the sampled beams, intersected with the loci.
    const Sampling s = make_sampling(m, cfg);
    const std::size_t n_p = sample_count(cfg.max_path_m, cfg.delta_d_m);
    std::vector<std::vector<IsoRlMatch>> per_i(n_p + 1);
    parallel_for(n_p, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin + 1; i <= end; ++i) {
            const double s_len = static_cast<double>(i) * cfg.delta_d_m;
            const Vec3 p = s.p(i);
            const Vec3 to_tx = s.tx - p;
            if (s_len + distance(p, s.rx) > cfg.max_path_m) continue;
            const std::size_t n_q = sample_count(cfg.max_path_m - s_len, cfg.delta_d_m);
            for (std::size_t j = 1; j <= n_q; ++j) {
                const Vec3 q = s.q(j);
                const double len = s_len + distance(p, q) + static_cast<double>(j) * cfg.delta_d_m;
                if (len > cfg.max_path_m) continue;
                const double t1 = incident_angle(to_tx, q - p);
                const double t2 = incident_angle(p - q, s.rx - q);
                if (t1 > max_angle || t2 > max_angle) continue;
                for (std::size_t sq = 0; sq < sequences.size(); ++sq) {
                    if (raster[sq].empty() || !on_locus(raster[sq], t1, t2)) continue;
                    const double angles[] = {t1, t2};
                    const double rl = sum_rl(db, sequences[sq], angles, cfg.extrapolation_bound_deg);
                    const double residual = rl - m.rl_measured_db;
                    if (std::abs(residual) > tol) continue;
                    per_i[i].push_back({{i, j, p, q, len, len - m.path_length_m}, sequences[sq], t1, t2, rl, residual});
                }
            }
        }
    });

    Method2Result out;
    std::vector<IsoRlMatch> finals;
    std::vector<GridKey> keys;
    const bool any_rl = std::any_of(per_i.begin(), per_i.end(), [](const auto& v) { return !v.empty(); });
    for (auto& row : per_i) {
        for (auto& match : row) {
            if (std::abs(match.pair.path_residual_m) <= cfg.path_tol_m) {
                const auto sq = static_cast<std::size_t>(
                    std::find(sequences.begin(), sequences.end(), match.materials) - sequences.begin());
                keys.push_back({sq, match.pair.i, match.pair.j});
                finals.push_back(match);
            }
            if (keep_pre_length) out.pre_length.push_back(std::move(match));
        }
    }
    if (finals.empty()) {
        out.result.status = any_rl ? SolveStatus::no_path_match : SolveStatus::no_rl_match;
        return out;
    }

    for (const auto& members : cluster_keys(keys)) {
        const std::size_t best = *std::min_element(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return std::make_tuple(std::abs(finals[a].pair.path_residual_m), std::abs(finals[a].rl_residual_db)) <
                   std::make_tuple(std::abs(finals[b].pair.path_residual_m), std::abs(finals[b].rl_residual_db));
        });
        const auto& f = finals[best];
        out.result.candidates.push_back(
            {to_trajectory(m, f.pair), f.materials, f.sum_rl_db, f.rl_residual_db, f.pair.path_residual_m});
    }
    rank_by_path(out.result.candidates);
    return out;
}

std::vector<TaggedPoint> export_points(std::span<const CandidateSolution> candidates)
{
    std::vector<TaggedPoint> points;
    for (const auto& c : candidates) {
        const auto rps = c.trajectory.reflection_points();
        for (std::size_t k = 0; k < rps.size() && k < c.materials.size(); ++k) {
            points.push_back({rps[k], c.materials[k]});
        }
    }
    return points;
}

std::string candidates_to_csv(std::span<const CandidateSolution> candidates)
{
    std::string out =
        "rank,rp1_x,rp1_y,rp1_z,rp2_x,rp2_y,rp2_z,theta1_deg,theta2_deg,material1,material2,sum_rl_db,"
        "rl_residual_db,path_residual_m\n";
    for (std::size_t r = 0; r < candidates.size(); ++r) {
        const auto& c = candidates[r];
        const auto rps = c.trajectory.reflection_points();
        const auto& angles = c.trajectory.incident_angles_deg;
        out += fmt::format("{},{:.6f},{:.6f},{:.6f}", r + 1, rps[0].x, rps[0].y, rps[0].z);
        if (rps.size() > 1) {
            out += fmt::format(",{:.6f},{:.6f},{:.6f}", rps[1].x, rps[1].y, rps[1].z);
        } else {
            out += ",,,";
        }
        out += fmt::format(",{:.6f}", angles[0]);
        out += angles.size() > 1 ? fmt::format(",{:.6f}", angles[1]) : std::string(",");
        out += fmt::format(",{},{}", c.materials[0], c.materials.size() > 1 ? c.materials[1] : "");
        out += fmt::format(",{:.6f},{:.6f},{:.6f}\n", c.sum_rl_db, c.rl_residual_db, c.path_residual_m);
    }
    return out;
}

std::string candidates_to_json(std::span<const CandidateSolution> candidates)
{
    auto doc = nlohmann::json::array();
    for (std::size_t r = 0; r < candidates.size(); ++r) {
        const auto& c = candidates[r];
        auto points = nlohmann::json::array();
        for (const auto& p : c.trajectory.points) points.push_back(to_json(p));
        doc.push_back({{"rank", r + 1},
                       {"points", std::move(points)},
                       {"incident_angles_deg", c.trajectory.incident_angles_deg},
                       {"materials", c.materials},
                       {"sum_rl_db", c.sum_rl_db},
                       {"rl_residual_db", c.rl_residual_db},
                       {"path_residual_m", c.path_residual_m}});
    }
    return doc.dump(2) + "\n";
}

std::vector<CandidateSolution> candidates_from_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(fmt::format("candidates: invalid JSON: {}", e.what()));
    }
    if (!doc.is_array()) throw SchemaError("candidates: top level must be an array");
    std::vector<CandidateSolution> out;
    std::size_t row = 0;
    for (const auto& item : doc) {
        ++row;
        try {
            if (!item.contains("points") || !item["points"].is_array() || !item.contains("materials")) {
                throw SchemaError("candidate needs 'points' and 'materials'");
            }
            std::vector<Vec3> points;
            for (const auto& p : item["points"]) {
                if (!p.is_array() || p.size() != 3) throw SchemaError("point must be a 3-element array");
                points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
            }
            CandidateSolution c;
            c.trajectory = build_trajectory(std::move(points));
            c.materials = item["materials"].get<MaterialSequence>();
            if (c.materials.size() != c.trajectory.bounce_count()) {
                throw SchemaError("material count differs from bounce count");
            }
            c.sum_rl_db = json_number(item, "sum_rl_db");
            c.rl_residual_db = json_number(item, "rl_residual_db");
            c.path_residual_m = json_number(item, "path_residual_m");
            out.push_back(std::move(c));
        } catch (const SchemaError& e) {
            throw SchemaError(fmt::format("candidate {}: {}", row, e.what()), row);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(fmt::format("candidate {}: {}", row, e.what()), row);
        } catch (const DomainError& e) {
            throw SchemaError(fmt::format("candidate {}: {}", row, e.what()), row);
        }
    }
    return out;
}

std::string points_to_csv(std::span<const TaggedPoint> points)
{
    std::string out = "x,y,z,material\n";
    for (const auto& p : points) {
        out += fmt::format("{:.6f},{:.6f},{:.6f},{}\n", p.position.x, p.position.y, p.position.z, p.material);
    }
    return out;
}

namespace {

void expect_header(const std::vector<std::string>& header, std::span<const std::string_view> expected)
{
    if (header.size() != expected.size()) {
        throw SchemaError(fmt::format("header has {} columns, expected {}", header.size(), expected.size()), 1);
    }
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (header[c] != expected[c]) {
            throw SchemaError(fmt::format("expected header '{}', found '{}'", expected[c], header[c]), 1, c + 1);
        }
    }
}

double cell_number(const std::vector<std::string>& cells, std::size_t r, std::size_t c)
{
    const auto v = parse_double(cells[c]);
    if (!v) throw SchemaError(fmt::format("cell '{}' is not a number", cells[c]), r + 1, c + 1);
    return *v;
}

}  // namespace

std::vector<TaggedPoint> parse_points_csv(std::string_view text)
{
    static constexpr std::string_view kHeader[] = {"x", "y", "z", "material"};
    const auto table = parse_csv(text);
    if (table.empty()) throw SchemaError("points file is empty", 1);
    expect_header(table.front(), kHeader);
    std::vector<TaggedPoint> out;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& cells = table[r];
        if (cells.size() != 4) throw SchemaError("row width differs from header", r + 1);
        if (cells[3].empty()) throw SchemaError("material is empty", r + 1, 4);
        out.push_back({{cell_number(cells, r, 0), cell_number(cells, r, 1), cell_number(cells, r, 2)}, cells[3]});
    }
    return out;
}

std::vector<TaggedPoint> points_from_candidates_csv(std::string_view text)
{
    static constexpr std::string_view kHeader[] = {
        "rank", "rp1_x", "rp1_y", "rp1_z", "rp2_x", "rp2_y", "rp2_z", "theta1_deg", "theta2_deg",
        "material1", "material2", "sum_rl_db", "rl_residual_db", "path_residual_m"};
    const auto table = parse_csv(text);
    if (table.empty()) throw SchemaError("candidate file is empty", 1);
    expect_header(table.front(), kHeader);
    std::vector<TaggedPoint> out;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& cells = table[r];
        if (cells.size() != std::size(kHeader)) throw SchemaError("row width differs from header", r + 1);
        if (cells[9].empty()) throw SchemaError("material1 is empty", r + 1, 10);
        out.push_back({{cell_number(cells, r, 1), cell_number(cells, r, 2), cell_number(cells, r, 3)}, cells[9]});
        if (!cells[10].empty()) {
            out.push_back({{cell_number(cells, r, 4), cell_number(cells, r, 5), cell_number(cells, r, 6)}, cells[10]});
        }
    }
    return out;
}

}  // namespace scatter_sense
