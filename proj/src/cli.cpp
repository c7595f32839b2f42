#include "scatter_sense/cli.hpp"

#include "scatter_sense/csv.hpp"
#include "scatter_sense/error.hpp"
#include "scatter_sense/fresnel.hpp"
#include "scatter_sense/materials.hpp"
#include "scatter_sense/rl_db.hpp"
#include "scatter_sense/scene_sim.hpp"
#include "scatter_sense/solver.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <iostream>
#include <optional>
#include <ostream>

namespace scatter_sense::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what)
{
    const auto v = parse_double(text);
    if (!v || !std::isfinite(*v)) throw UsageError(fmt::format("{}: '{}' is not a number", what, text));
    return *v;
}

// start:stop:step, inclusive of stop when it falls on the grid.
std::vector<double> parse_range(const std::string& text, const std::string& what)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(fmt::format("{}: expected start:stop:step, got '{}'", what, text));
    const double start = parse_number(parts[0], what);
    const double stop = parse_number(parts[1], what);
    const double step = parse_number(parts[2], what);
    if (!(step > 0.0) || stop < start) {
        throw UsageError(fmt::format("{}: need step > 0 and stop >= start in '{}'", what, text));
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> out;
    out.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
}

Vec3 parse_triple(const std::string& text, const std::string& what)
{
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw UsageError(fmt::format("{}: expected x,y,z, got '{}'", what, text));
    return {parse_number(parts[0], what), parse_number(parts[1], what), parse_number(parts[2], what)};
}

std::vector<std::string> parse_list(const std::string& text)
{
    std::vector<std::string> out;
    for (auto& item : split(text, ',')) {
        if (!item.empty()) out.push_back(std::move(item));
    }
    return out;
}

struct Emitter {
    std::ostream& out;
    CommandOutcome& outcome;

    void write(const std::filesystem::path& path, std::string_view contents, std::string_view summary)
    {
        write_file_atomic(path, contents);
        outcome.artifacts.push_back(path);
        out << fmt::format("wrote {}: {}\n", path.string(), summary);
    }
};

MaterialCatalog load_catalog(const std::string& path)
{
    return path.empty() ? MaterialCatalog::builtin() : MaterialCatalog::load(path);
}

std::vector<MaterialParams> select_materials(const MaterialCatalog& catalog, const std::string& list)
{
    if (list.empty()) return catalog.materials();
    std::vector<MaterialParams> out;
    for (const auto& name : parse_list(list)) out.push_back(catalog.lookup(name));
    return out;
}

std::string fmt_num(double v) { return fmt::format("{:.6f}", v); }

// Option storage for every subcommand.
struct Args {
    std::string out;
    std::string json_out;
    std::string pre_length_out;
    double freq_ghz = 100.0;
    std::string angles;
    std::string materials;
    std::string catalog;
    std::string db;
    std::string in;
    int decimals = 6;

    std::string kind;
    double target_db = 0.0;
    double tol_db = 0.05;
    double angle_step = 0.1;

    std::string scene;
    std::string tx;
    std::string rx;
    std::string aod;
    std::string aoa;
    double noise_db = 0.0;
    int samples = 1;
    std::optional<std::uint64_t> seed;
    double p_tx_dbm = 30.0;
    double arrival_tol = kDefaultArrivalTolerance;

    std::string method;
    std::string measurement;
    std::optional<double> path_m;
    std::optional<double> rl_db;
    double rl_unc_db = 0.0;
    std::string rl_table;
    SolverConfig cfg;

    std::string candidates;
};

void cmd_gen_db(const Args& a, Emitter& e)
{
    const auto catalog = load_catalog(a.catalog);
    const auto materials = select_materials(catalog, a.materials);
    const auto grid = parse_range(a.angles.empty() ? "0:80:5" : a.angles, "--angles");
    const auto db = generate_db(materials, a.freq_ghz, grid);
    e.write(a.out, to_csv(db, a.decimals),
            fmt::format("{} materials x {} angles at {} GHz", materials.size(), grid.size(), a.freq_ghz));
}

void cmd_import_db(const Args& a, Emitter& e)
{
    const auto db = import_db(a.in, a.freq_ghz);
    const auto summary = fmt::format("{} materials x {} angles, extrapolation bound {} deg", db.materials().size(),
                                     db.angle_grid().size(), db.default_extrapolation_bound());
    if (a.out.empty()) {
        e.out << fmt::format("imported {}: {}\n", a.in, summary);
        return;
    }
    e.write(a.out, to_csv(db, a.decimals), summary);
}

void cmd_emit_curves(const Args& a, Emitter& e)
{
    if (a.kind == "rl-vs-angle") {
        const auto catalog = load_catalog(a.catalog);
        const auto materials = select_materials(catalog, a.materials);
        const auto grid = parse_range(a.angles.empty() ? "0:89:1" : a.angles, "--angles");
        e.write(a.out, to_csv(generate_db(materials, a.freq_ghz, grid), a.decimals),
                fmt::format("RL of {} materials on {} angles", materials.size(), grid.size()));
        return;
    }
    if (a.kind == "coeff-amplitude" || a.kind == "coeff-power") {
        const bool power = a.kind == "coeff-power";
        const auto catalog = load_catalog(a.catalog);
        const auto materials = select_materials(catalog, a.materials);
        const auto grid = parse_range(a.angles.empty() ? "0:89:1" : a.angles, "--angles");
        std::string csv = "angle_deg,material,te,tm\n";
        for (const auto& mat : materials) {
            const auto eta = relative_permittivity(mat, a.freq_ghz);
            for (double theta : grid) {
                const auto r = reflection_coefficients(eta, theta);
                const double te = power ? r.power_te() : std::abs(r.r_te);
                const double tm = power ? r.power_tm() : std::abs(r.r_tm);
                csv += fmt::format("{},{},{},{}\n", fmt_num(theta), mat.name, fmt_num(te), fmt_num(tm));
            }
        }
        e.write(a.out, csv, fmt::format("{} rows", materials.size() * grid.size()));
        return;
    }
    if (a.db.empty()) throw UsageError(fmt::format("emit-curves {} requires --db", a.kind));
    const auto db = import_db(a.db, a.freq_ghz);
    const auto names = a.materials.empty() ? db.materials() : parse_list(a.materials);
    if (a.kind == "sigma-rl-surface") {
        const auto grid = parse_range(a.angles.empty() ? "0:89:1" : a.angles, "--angles");
        std::string csv = "theta1_deg,theta2_deg,material1,material2,sum_rl_db\n";
        std::size_t rows = 0;
        for (const auto& m1 : names) {
            for (const auto& m2 : names) {
                const std::string seq[] = {m1, m2};
                for (double t1 : grid) {
                    for (double t2 : grid) {
                        const double angles[] = {t1, t2};
                        csv += fmt::format("{},{},{},{},{}\n", fmt_num(t1), fmt_num(t2), m1, m2,
                                           fmt_num(sum_rl(db, seq, angles)));
                        ++rows;
                    }
                }
            }
        }
        e.write(a.out, csv, fmt::format("{} rows", rows));
        return;
    }
    // iso-rl-trace
    const auto result = inverse_lookup(db, a.target_db, 2, {a.tol_db, a.angle_step, std::nullopt});
    std::string csv = "locus,material1,material2,theta1_deg,theta2_deg\n";
    std::size_t rows = 0;
    std::size_t locus_id = 0;
    for (const auto& locus : result.loci) {
        ++locus_id;
        if (!a.materials.empty() && (std::find(names.begin(), names.end(), locus.sequence[0]) == names.end() ||
                                     std::find(names.begin(), names.end(), locus.sequence[1]) == names.end())) {
            continue;
        }
        for (const auto& p : locus.points) {
            csv += fmt::format("{},{},{},{},{}\n", locus_id, locus.sequence[0], locus.sequence[1], fmt_num(p.theta1_deg),
                               fmt_num(p.theta2_deg));
            ++rows;
        }
    }
    e.write(a.out, csv, fmt::format("{} loci, {} points at {} dB", result.loci.size(), rows, a.target_db));
}

void cmd_simulate(const Args& a, Emitter& e)
{
    if (a.noise_db > 0.0 && !a.seed) throw UsageError("simulate with --noise-db > 0 requires --seed");
    if (a.noise_db < 0.0) throw UsageError("--noise-db must be >= 0");
    const auto scene = Scene::load(a.scene);
    const auto db = [&] {
        if (!a.db.empty()) return import_db(a.db, scene.frequency_ghz);
        const auto catalog = load_catalog(a.catalog);
        return generate_db(catalog.materials(), scene.frequency_ghz, parse_range("0:89:0.5", "grid"));
    }();
    const Ray ray(parse_triple(a.tx, "--tx"), parse_triple(a.aod, "--aod"));
    const Vec3 rx = parse_triple(a.rx, "--rx");

    SynthesisOptions opt;
    opt.noise_sigma_db = a.noise_db;
    opt.n_samples = a.samples;
    opt.seed = a.seed.value_or(0);
    opt.p_tx_dbm = a.p_tx_dbm;
    opt.arrival_tol = a.arrival_tol;
    const auto m = synthesize(scene, ray, rx, db, opt);
    if (!m) throw DomainError("the departure ray does not reach the receiver within the scene's bounce limit");
    e.write(a.out, m->to_json_text(),
            fmt::format("path {:.4f} m, RL {:.4f} dB (+/- {:.4f})", m->path_length_m, m->rl_measured_db,
                        m->rl_uncertainty_db));
}

Measurement solve_measurement(const Args& a)
{
    if (!a.measurement.empty()) return Measurement::load(a.measurement);
    if (a.tx.empty() || a.rx.empty() || a.aod.empty() || a.aoa.empty() || !a.path_m || !a.rl_db) {
        throw UsageError("solve needs --measurement or all of --tx --rx --aod --aoa --path-m --rl-db");
    }
    Measurement m;
    m.tx = parse_triple(a.tx, "--tx");
    m.rx = parse_triple(a.rx, "--rx");
    try {
        m.aod = normalized(parse_triple(a.aod, "--aod"));
        m.aoa = normalized(parse_triple(a.aoa, "--aoa"));
    } catch (const DomainError&) {
        throw UsageError("beam directions must be non-zero");
    }
    m.path_length_m = *a.path_m;
    m.frequency_ghz = a.freq_ghz;
    m.rl_measured_db = *a.rl_db;
    m.rl_uncertainty_db = a.rl_unc_db;
    m.validate();
    return m;
}

void cmd_solve(const Args& a, Emitter& e)
{
    if (!a.rl_table.empty() && a.method != "method1") throw UsageError("--rl-table applies to method1 only");
    if (!a.pre_length_out.empty() && a.method != "method2") throw UsageError("--pre-length-out applies to method2 only");
    const Measurement m = solve_measurement(a);
    const auto db = import_db(a.db, m.frequency_ghz);

    SolveResult result;
    std::vector<IsoRlMatch> pre_length;
    if (a.method == "method1") {
        if (a.rl_table.empty()) {
            result = method1(m, db, a.cfg);
        } else {
            result = method1(m, TrajectoryRlTable::load(a.rl_table), a.cfg);
        }
    } else {
        auto r2 = method2(m, db, a.cfg, !a.pre_length_out.empty());
        result = std::move(r2.result);
        pre_length = std::move(r2.pre_length);
    }

    const auto summary = fmt::format("{} candidates ({})", result.candidates.size(), to_string(result.status));
    const auto csv = candidates_to_csv(result.candidates);
    if (a.out.empty() && a.json_out.empty()) {
        e.out << csv;
        e.out << fmt::format("{}: {}\n", a.method, summary);
    }
    if (!a.out.empty()) e.write(a.out, csv, summary);
    if (!a.json_out.empty()) e.write(a.json_out, candidates_to_json(result.candidates), summary);
    if (!a.pre_length_out.empty()) {
        std::string pre = "rp1_x,rp1_y,rp1_z,rp2_x,rp2_y,rp2_z,theta1_deg,theta2_deg,material1,material2,sum_rl_db,"
                          "rl_residual_db,path_length_m\n";
        for (const auto& p : pre_length) {
            pre += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", fmt_num(p.pair.rp1.x), fmt_num(p.pair.rp1.y),
                               fmt_num(p.pair.rp1.z), fmt_num(p.pair.rp2.x), fmt_num(p.pair.rp2.y),
                               fmt_num(p.pair.rp2.z), fmt_num(p.theta1_deg), fmt_num(p.theta2_deg), p.materials[0],
                               p.materials[1], fmt_num(p.sum_rl_db), fmt_num(p.rl_residual_db),
                               fmt_num(p.pair.path_length_m));
        }
        e.write(a.pre_length_out, pre, fmt::format("{} pre-length matches", pre_length.size()));
    }
}

void cmd_export_points(const Args& a, Emitter& e)
{
    const auto text = read_text_file(a.candidates);
    const std::filesystem::path src(a.candidates);
    const auto points = src.extension() == ".json" ? export_points(candidates_from_json(text))
                                                   : points_from_candidates_csv(text);
    e.write(a.out, points_to_csv(points), fmt::format("{} points", points.size()));
}

}  // namespace

CommandOutcome run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CommandOutcome outcome;
    Args a;
    CLI::App app{"Scatterer position and material estimation from mmWave link measurements", "scatter-sense"};
    app.require_subcommand(1);
    app.allow_extras(false);

    auto add_out = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--out", a.out, "Output file");
        if (required) opt->required();
    };
    auto add_freq = [&](CLI::App* sub) { sub->add_option("--freq-ghz", a.freq_ghz, "Carrier frequency in GHz"); };

    auto* gen = app.add_subcommand("gen-db", "Compute a reflection-loss database from material parameters");
    add_freq(gen);
    gen->add_option("--angles", a.angles, "Incident-angle grid start:stop:step in degrees (default 0:80:5)");
    gen->add_option("--materials", a.materials, "Comma-separated material names (default: whole catalog)");
    gen->add_option("--catalog", a.catalog, "Material catalog JSON (default: built-in)");
    gen->add_option("--decimals", a.decimals, "Printed decimals")->check(CLI::Range(0, 15));
    add_out(gen, true);

    auto* imp = app.add_subcommand("import-db", "Validate a reflection-loss table and optionally re-emit it");
    imp->add_option("--in", a.in, "Input CSV")->required();
    add_freq(imp);
    imp->add_option("--decimals", a.decimals, "Printed decimals")->check(CLI::Range(0, 15));
    add_out(imp, false);

    auto* emit = app.add_subcommand("emit-curves", "Write plot-ready curve data");
    emit->add_option("kind", a.kind, "Curve kind")
        ->required()
        ->check(CLI::IsMember({"rl-vs-angle", "coeff-amplitude", "coeff-power", "sigma-rl-surface", "iso-rl-trace"}));
    add_freq(emit);
    emit->add_option("--angles", a.angles, "Angle grid start:stop:step in degrees (default 0:89:1)");
    emit->add_option("--materials", a.materials, "Comma-separated material names");
    emit->add_option("--catalog", a.catalog, "Material catalog JSON (default: built-in)");
    emit->add_option("--db", a.db, "Reflection-loss CSV (sigma-rl-surface, iso-rl-trace)");
    emit->add_option("--target-db", a.target_db, "Iso-RL target in dB");
    emit->add_option("--tol-db", a.tol_db, "Iso-RL tolerance in dB");
    emit->add_option("--angle-step", a.angle_step, "Iso-RL scan step in degrees");
    emit->add_option("--decimals", a.decimals, "Printed decimals")->check(CLI::Range(0, 15));
    add_out(emit, true);

    auto* sim = app.add_subcommand("simulate", "Trace a scene and write the resulting measurement");
    sim->add_option("--scene", a.scene, "Scene JSON")->required();
    sim->add_option("--db", a.db, "Reflection-loss CSV (default: computed from the catalog)");
    sim->add_option("--catalog", a.catalog, "Material catalog JSON (default: built-in)");
    sim->add_option("--tx", a.tx, "Transmitter x,y,z")->required();
    sim->add_option("--aod", a.aod, "Departure direction x,y,z")->required();
    sim->add_option("--rx", a.rx, "Receiver x,y,z")->required();
    sim->add_option("--noise-db", a.noise_db, "Per-sample RSS noise sigma in dB");
    sim->add_option("--samples", a.samples, "Number of RSS samples")->check(CLI::PositiveNumber);
    sim->add_option("--seed", a.seed, "RNG seed (required when --noise-db > 0)");
    sim->add_option("--p-tx-dbm", a.p_tx_dbm, "Transmit power in dBm");
    sim->add_option("--arrival-tol", a.arrival_tol, "Receiver capture radius in m");
    add_out(sim, true);

    auto* solve = app.add_subcommand("solve", "Estimate reflection points and materials");
    solve->add_option("method", a.method, "method1 or method2")->required()->check(CLI::IsMember({"method1", "method2"}));
    solve->add_option("--db", a.db, "Reflection-loss CSV")->required();
    solve->add_option("--rl-table", a.rl_table, "Per-trajectory RL table CSV scored instead of the database (method1)");
    solve->add_option("--measurement", a.measurement, "Measurement JSON");
    add_freq(solve);
    solve->add_option("--tx", a.tx, "Transmitter x,y,z");
    solve->add_option("--rx", a.rx, "Receiver x,y,z");
    solve->add_option("--aod", a.aod, "Departure direction x,y,z");
    solve->add_option("--aoa", a.aoa, "Arrival direction x,y,z");
    solve->add_option("--path-m", a.path_m, "Measured path length in m");
    solve->add_option("--rl-db", a.rl_db, "Measured reflection loss in dB");
    solve->add_option("--rl-unc-db", a.rl_unc_db, "Measured reflection loss uncertainty in dB");
    solve->add_option("--delta-d", a.cfg.delta_d_m, "Beam sampling step in m");
    solve->add_option("--path-tol", a.cfg.path_tol_m, "Path-length tolerance in m");
    solve->add_option("--rl-tol", a.cfg.rl_tol_db, "RL tolerance in dB");
    solve->add_option("--angle-step", a.cfg.angle_step_deg, "Iso-RL scan step in degrees");
    solve->add_option("--max-path", a.cfg.max_path_m, "Enumeration bound in m");
    solve->add_option("--extrapolation-bound", a.cfg.extrapolation_bound_deg, "Largest scored incident angle");
    solve->add_option("--json-out", a.json_out, "Candidate JSON output");
    solve->add_option("--pre-length-out", a.pre_length_out, "Method2 matches before path filtering (CSV)");
    add_out(solve, false);

    auto* exp = app.add_subcommand("export-points", "Turn candidates into a material-tagged point cloud");
    exp->add_option("--candidates", a.candidates, "Candidate CSV or JSON")->required();
    add_out(exp, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return outcome;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return outcome;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        outcome.exit_code = kExitUsage;
        return outcome;
    }

    Emitter emitter{out, outcome};
    try {
        if (gen->parsed()) cmd_gen_db(a, emitter);
        if (imp->parsed()) cmd_import_db(a, emitter);
        if (emit->parsed()) cmd_emit_curves(a, emitter);
        if (sim->parsed()) cmd_simulate(a, emitter);
        if (solve->parsed()) cmd_solve(a, emitter);
        if (exp->parsed()) cmd_export_points(a, emitter);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        outcome.exit_code = kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        outcome.exit_code = kExitDomainError;
    }
    return outcome;
}

CommandOutcome run(std::span<const std::string> args) { return run(args, std::cout, std::cerr); }

}  // namespace scatter_sense::cli
