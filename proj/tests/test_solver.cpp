#include "fixtures.hpp"

#include "scatter_sense/error.hpp"
#include "scatter_sense/solver.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace scatter_sense;

namespace {

const Vec3 kTx{0, 0, 10};
const Vec3 kRx{0, -5, 5};
const Vec3 kAod{4, 5, -1};

const char* const kFigures[] = {"scenes/fig2a.json", "scenes/fig2b.json", "scenes/fig2c.json", "scenes/fig2d.json"};

bool near(const Vec3& a, const Vec3& b, double tol) { return distance(a, b) <= tol; }

bool contains_truth(const SolveResult& r, const TracedPath& truth, double tol)
{
    for (const auto& c : r.candidates) {
        if (c.materials != truth.materials) continue;
        if (c.trajectory.bounce_count() != truth.trajectory.bounce_count()) continue;
        bool ok = true;
        for (std::size_t k = 1; k + 1 < c.trajectory.points.size(); ++k) {
            ok = ok && near(c.trajectory.points[k], truth.trajectory.points[k], tol);
        }
        if (ok) return true;
    }
    return false;
}

Scene with_materials(Scene scene, const std::string& first, const std::string& second)
{
    scene.scatterers[0].material = first;
    scene.scatterers[1].material = second;
    return scene;
}

// Coarser beam sampling keeps the O(N^2) star-point scan short.
SolverConfig method2_config()
{
    SolverConfig cfg;
    cfg.delta_d_m = 0.05;
    cfg.path_tol_m = 0.05;
    cfg.rl_tol_db = 0.1;
    cfg.max_path_m = 40.0;
    return cfg;
}

class ScopedThreads {
public:
    explicit ScopedThreads(const char* value)
    {
        if (const char* old = std::getenv("SCATTER_SENSE_THREADS")) saved_ = old;
        ::setenv("SCATTER_SENSE_THREADS", value, 1);
    }
    ~ScopedThreads()
    {
        if (saved_) {
            ::setenv("SCATTER_SENSE_THREADS", saved_->c_str(), 1);
        } else {
            ::unsetenv("SCATTER_SENSE_THREADS");
        }
    }
    ScopedThreads(const ScopedThreads&) = delete;
    ScopedThreads& operator=(const ScopedThreads&) = delete;

private:
    std::optional<std::string> saved_;
};

}  // namespace

TEST_CASE("configuration invariants")
{
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.path_tol_m = 0.009;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.rl_tol_db = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.angle_step_deg = -0.1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    CHECK(to_string(SolveStatus::ok) == "ok");
    CHECK(to_string(SolveStatus::no_path_match) == "no-path-match");
    CHECK(to_string(SolveStatus::no_rl_match) == "no-rl-match");
}

TEST_CASE("path-matched pairs on the two-bounce example")
{
    const auto m = fixtures::fig7(22.24);
    const SolverConfig cfg;
    const auto clusters = enumerate_pairs(m, cfg);
    REQUIRE_FALSE(clusters.empty());
    std::size_t total = 0;
    for (const auto& c : clusters) {
        total += c.members.size();
        for (const auto& p : c.members) {
            CHECK(std::abs(p.path_residual_m) <= cfg.path_tol_m);
            CHECK(p.path_length_m == doctest::Approx(to_trajectory(m, p).total_length_m).epsilon(1e-12));
            CHECK(std::abs(c.representative.path_residual_m) <= std::abs(p.path_residual_m));
        }
    }
    CHECK(total > 100);

    // The four candidate trajectories all lie on the path-matched set.
    const Vec3 rps[4][2] = {{{8, 10, 8}, {10, 7.5, 7.5}},
                            {{8.6, 10.75, 7.85}, {6, 2.5, 6.5}},
                            {{5.8, 7.25, 8.55}, {10.9, 8.62, 7.73}},
                            {{0.8, 1, 9.8}, {11.1, 8.88, 7.78}}};
    for (const auto& rp : rps) {
        double best = 1e9;
        for (const auto& c : clusters) {
            for (const auto& p : c.members) best = std::min(best, distance(p.rp1, rp[0]) + distance(p.rp2, rp[1]));
        }
        CHECK(best < 0.3);
    }
}

TEST_CASE("no pairs when the measured path is shorter than the baseline")
{
    auto m = fixtures::fig7(22.24);
    m.path_length_m = distance(m.tx, m.rx) + 1e-3;
    CHECK(enumerate_pairs(m, SolverConfig{}).empty());
}

TEST_CASE("halving the sampling step never loses a cluster")
{
    const auto m = fixtures::fig7(22.24);
    SolverConfig coarse;
    coarse.delta_d_m = 0.2;
    coarse.path_tol_m = 0.1;
    SolverConfig fine = coarse;
    fine.delta_d_m = 0.1;
    std::vector<PairSample> fine_pairs;
    for (const auto& c : enumerate_pairs(m, fine)) fine_pairs.insert(fine_pairs.end(), c.members.begin(), c.members.end());
    REQUIRE_FALSE(fine_pairs.empty());
    const auto coarse_clusters = enumerate_pairs(m, coarse);
    REQUIRE_FALSE(coarse_clusters.empty());
    for (const auto& c : coarse_clusters) {
        double best = 1e9;
        for (const auto& f : fine_pairs) {
            best = std::min(best, std::max(distance(c.representative.rp1, f.rp1), distance(c.representative.rp2, f.rp2)));
        }
        CHECK(best <= coarse.delta_d_m);
    }
}

TEST_CASE("candidate residuals are consistent")
{
    const auto m = fixtures::fig7(22.24);
    const auto db = fixtures::table2();
    const SolverConfig cfg;
    const auto r = method1(m, db, cfg);
    REQUIRE(r.status == SolveStatus::ok);
    REQUIRE_FALSE(r.candidates.empty());
    for (const auto& c : r.candidates) {
        CHECK(c.path_residual_m == doctest::Approx(c.trajectory.total_length_m - m.path_length_m).epsilon(1e-12));
        CHECK(std::abs(c.path_residual_m) <= cfg.path_tol_m);
        CHECK(c.rl_residual_db == doctest::Approx(c.sum_rl_db - m.rl_measured_db).epsilon(1e-12));
        CHECK(std::abs(c.rl_residual_db) <= cfg.rl_tol_db);
        CHECK(c.sum_rl_db == doctest::Approx(sum_rl(db, c.materials, c.trajectory.incident_angles_deg)).epsilon(1e-12));
    }
    for (std::size_t k = 1; k < r.candidates.size(); ++k) {
        CHECK(std::abs(r.candidates[k - 1].rl_residual_db) <= std::abs(r.candidates[k].rl_residual_db));
    }
}

TEST_CASE("per-trajectory loss table selects wood then glass")
{
    const auto table = TrajectoryRlTable::load(fixtures::asset("table3.csv"));
    CHECK(table.rows().size() == 36);
    CHECK(table.materials() == std::vector<std::string>{"wood", "plasterboard", "glass"});
    const auto r = method1(fixtures::fig7(22.24), table, SolverConfig{});
    REQUIRE(r.status == SolveStatus::ok);
    REQUIRE(r.candidates.size() == 1);
    const auto& best = r.candidates.front();
    CHECK(best.materials == MaterialSequence{"wood", "glass"});
    CHECK(near(best.trajectory.points[1], {8, 10, 8}, 0.1));
    CHECK(near(best.trajectory.points[2], {10, 7.5, 7.5}, 0.1));

    const auto c = method1(fixtures::fig7(12.7, 1.0), table, SolverConfig{});
    REQUIRE(c.candidates.size() == 1);
    CHECK(c.candidates.front().materials == MaterialSequence{"glass", "glass"});
    CHECK(near(c.candidates.front().trajectory.points[1], {5.8, 7.25, 8.55}, 0.1));

    CHECK_THROWS_AS(TrajectoryRlTable::parse("trajectory,x\nA,1\n"), SchemaError);
}

TEST_CASE("database scoring keeps every hypothesis within tolerance")
{
    // The database continuum admits many trajectories at 22.24 dB; the true one is among them.
    const auto r = method1(fixtures::fig7(22.24), fixtures::table2(), SolverConfig{});
    bool found = false;
    for (const auto& c : r.candidates) {
        found = found || (c.materials == MaterialSequence{"wood", "glass"} && near(c.trajectory.points[1], {8, 10, 8}, 0.3) &&
                          near(c.trajectory.points[2], {10, 7.5, 7.5}, 0.3));
    }
    CHECK(found);
}

TEST_CASE("simulate then solve recovers the trajectory")
{
    const auto db = fixtures::table2();
    const std::string names[] = {"wood", "plasterboard", "glass"};
    int solved = 0;
    int total = 0;
    for (const char* file : kFigures) {
        const auto base = Scene::load(fixtures::asset(file));
        for (const auto& a : names) {
            for (const auto& b : names) {
                CAPTURE(file);
                CAPTURE(a);
                CAPTURE(b);
                const auto scene = with_materials(base, a, b);
                const auto truth = trace(scene, Ray(kTx, kAod), kRx);
                REQUIRE(truth.has_value());
                const auto m = synthesize(scene, Ray(kTx, kAod), kRx, db);
                REQUIRE(m.has_value());
                const auto r = method1(*m, db, SolverConfig{});
                ++total;
                CHECK(r.status == SolveStatus::ok);
                const bool hit = contains_truth(r, *truth, 0.25);
                CHECK(hit);
                solved += hit ? 1 : 0;
            }
        }
    }
    CHECK(solved == total);
}

TEST_CASE("both methods contain the truth")
{
    const auto db = fixtures::table2();
    const auto scene = Scene::load(fixtures::asset("scenes/fig2a.json"));
    const auto truth = trace(scene, Ray(kTx, kAod), kRx);
    const auto m = synthesize(scene, Ray(kTx, kAod), kRx, db);
    REQUIRE(m.has_value());
    const auto cfg = method2_config();
    const auto r1 = method1(*m, db, cfg);
    const auto r2 = method2(*m, db, cfg, true);
    CHECK(contains_truth(r1, *truth, 0.25));
    CHECK(contains_truth(r2.result, *truth, 0.25));
    CHECK(r2.pre_length.size() >= r2.result.candidates.size());
    for (const auto& c : r2.result.candidates) {
        CHECK(std::abs(c.path_residual_m) <= cfg.path_tol_m);
        CHECK(std::abs(c.rl_residual_db) <= cfg.rl_tol_db);
    }
    for (std::size_t k = 1; k < r2.result.candidates.size(); ++k) {
        CHECK(std::abs(r2.result.candidates[k - 1].path_residual_m) <= std::abs(r2.result.candidates[k].path_residual_m));
    }
    for (const auto& p : r2.pre_length) {
        const double angles[] = {p.theta1_deg, p.theta2_deg};
        CHECK(p.sum_rl_db == doctest::Approx(sum_rl(db, p.materials, angles)).epsilon(1e-12));
    }
}

TEST_CASE("single reflection is tried first")
{
    const auto db = fixtures::table2();
    const auto scene = Scene::load(fixtures::asset("scenes/fig1a.json"));
    const auto m = synthesize(scene, Ray({-10, -5, 5}, {4, 1, 0}), {-10, 5, 5}, db);
    REQUIRE(m.has_value());
    for (const auto& r : {method1(*m, db, SolverConfig{}), method2(*m, db, method2_config()).result}) {
        REQUIRE(r.status == SolveStatus::ok);
        REQUIRE_FALSE(r.candidates.empty());
        CHECK(r.candidates.front().materials == MaterialSequence{"glass"});
        CHECK(near(r.candidates.front().trajectory.points[1], {10, 0, 5}, 1e-9));
    }
}

TEST_CASE("failure diagnostics")
{
    const auto db = fixtures::table2();
    CHECK(method1(fixtures::fig7(80.0), db, SolverConfig{}).status == SolveStatus::no_rl_match);
    CHECK(method2(fixtures::fig7(80.0), db, method2_config()).result.status == SolveStatus::no_rl_match);

    auto m = fixtures::fig7(22.24);
    m.path_length_m = distance(m.tx, m.rx) + 1e-3;
    CHECK(method1(m, db, SolverConfig{}).status == SolveStatus::no_path_match);
    CHECK(method2(m, db, method2_config()).result.status == SolveStatus::no_path_match);

    auto bad = fixtures::fig7(22.24);
    bad.aod = {1, 1, 1};
    CHECK_THROWS_AS(method1(bad, db, SolverConfig{}), DomainError);
}

TEST_CASE("candidate and point files round trip")
{
    const auto r = method1(fixtures::fig7(22.24), fixtures::table2(), SolverConfig{});
    REQUIRE(r.candidates.size() > 1);
    const auto json = candidates_to_json(r.candidates);
    const auto back = candidates_from_json(json);
    REQUIRE(back.size() == r.candidates.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].materials == r.candidates[k].materials);
        CHECK(back[k].sum_rl_db == r.candidates[k].sum_rl_db);
        CHECK(back[k].trajectory.points == r.candidates[k].trajectory.points);
    }
    CHECK(candidates_to_json(back) == json);

    const auto points = export_points(r.candidates);
    REQUIRE(points.size() == 2 * r.candidates.size());
    CHECK(points[0].position == r.candidates[0].trajectory.points[1]);
    CHECK(points[1].material == r.candidates[0].materials[1]);

    const auto from_csv = points_from_candidates_csv(candidates_to_csv(r.candidates));
    REQUIRE(from_csv.size() == points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        CHECK(near(from_csv[k].position, points[k].position, 1e-6));
        CHECK(from_csv[k].material == points[k].material);
    }
    const auto reparsed = parse_points_csv(points_to_csv(points));
    REQUIRE(reparsed.size() == points.size());
    CHECK(points_to_csv(reparsed) == points_to_csv(points));

    CHECK_THROWS_AS(candidates_from_json("{}"), SchemaError);
    CHECK_THROWS_AS(parse_points_csv("a,b\n1,2\n"), SchemaError);
}

TEST_CASE("single-bounce candidates export one point each")
{
    const auto db = fixtures::table2();
    const auto scene = Scene::load(fixtures::asset("scenes/fig1a.json"));
    const auto m = synthesize(scene, Ray({-10, -5, 5}, {4, 1, 0}), {-10, 5, 5}, db);
    const auto r = method1(*m, db, SolverConfig{});
    const auto points = points_from_candidates_csv(candidates_to_csv(r.candidates));
    CHECK(points.size() == r.candidates.size());
}

TEST_CASE("results do not depend on the worker count")
{
    const auto db = fixtures::table2();
    const auto m = fixtures::fig7(22.24);
    std::string one;
    std::string many;
    {
        ScopedThreads t("1");
        one = candidates_to_csv(method1(m, db, SolverConfig{}).candidates) +
              candidates_to_csv(method2(m, db, method2_config()).result.candidates);
    }
    {
        ScopedThreads t("4");
        many = candidates_to_csv(method1(m, db, SolverConfig{}).candidates) +
               candidates_to_csv(method2(m, db, method2_config()).result.candidates);
    }
    CHECK(one == many);
}
