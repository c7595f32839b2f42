#pragma once

#include "scatter_sense/rl_db.hpp"
#include "scatter_sense/scene_sim.hpp"

#include <filesystem>
#include <string>

namespace fixtures {

inline std::filesystem::path asset(const std::string& name) { return std::filesystem::path(SCATTER_SENSE_ASSETS) / name; }

inline scatter_sense::RlDatabase table2() { return scatter_sense::import_db(asset("table2.csv"), 100.0); }

// TX(0,0,10) along (4,5,-1), RX(0,-5,5) receiving along (-4,-5,-1), d = 32.4 m.
inline scatter_sense::Measurement fig7(double rl_db, double uncertainty_db = 0.0)
{
    scatter_sense::Measurement m;
    m.tx = {0, 0, 10};
    m.rx = {0, -5, 5};
    m.aod = scatter_sense::normalized({4, 5, -1});
    m.aoa = scatter_sense::normalized({-4, -5, -1});
    m.path_length_m = 32.4;
    m.frequency_ghz = 100.0;
    m.rl_measured_db = rl_db;
    m.rl_uncertainty_db = uncertainty_db;
    return m;
}

// Scratch directory unique to the calling test binary.
inline std::filesystem::path scratch(const std::string& leaf)
{
    auto dir = std::filesystem::temp_directory_path() / ("scatter_sense_" + leaf);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
