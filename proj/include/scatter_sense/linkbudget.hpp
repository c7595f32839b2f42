#pragma once

#include <optional>
#include <span>

namespace scatter_sense {

struct PowerObservation {
    double p_tx_dbm = 0.0;
    double p_rx_dbm = 0.0;
    double f_mhz = 0.0;
    double path_length_m = 0.0;
};

struct ReflectionLossEstimate {
    double rl_db = 0.0;
    // Set when the powers imply gain over free space, i.e. an inconsistent observation.
    bool negative = false;
};

struct RssAggregate {
    double mean_dbm = 0.0;
    std::optional<double> stderr_db;  // absent for a single sample
};

// Friis free-space path loss, f in MHz and d in km.
double fspl(double f_mhz, double d_km);

// (p_tx - p_rx) - FSPL. Not clamped at zero.
ReflectionLossEstimate rl_from_powers(const PowerObservation& obs);

// Mean and standard error of dB-valued samples, computed in the dB domain.
RssAggregate aggregate_rss(std::span<const double> samples_dbm);

}  // namespace scatter_sense
