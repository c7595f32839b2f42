#include "scatter_sense/linkbudget.hpp"

#include "scatter_sense/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace scatter_sense {

double fspl(double f_mhz, double d_km)
{
    if (!(f_mhz > 0.0) || !(d_km > 0.0)) {
        throw DomainError(fmt::format("FSPL needs positive frequency and distance (f={} MHz, d={} km)", f_mhz, d_km));
    }
    return 32.4 + 20.0 * std::log10(f_mhz) + 20.0 * std::log10(d_km);
}

ReflectionLossEstimate rl_from_powers(const PowerObservation& obs)
{
    if (!(obs.path_length_m > 0.0)) {
        throw DomainError(fmt::format("path length must be positive, got {} m", obs.path_length_m));
    }
    const double path_loss = obs.p_tx_dbm - obs.p_rx_dbm;
    const double rl = path_loss - fspl(obs.f_mhz, obs.path_length_m / 1000.0);
    return {rl, rl < 0.0};
}

RssAggregate aggregate_rss(std::span<const double> samples_dbm)
{
    if (samples_dbm.empty()) throw DomainError("cannot aggregate an empty RSS sample set");
    const double n = static_cast<double>(samples_dbm.size());
    const double mean = std::accumulate(samples_dbm.begin(), samples_dbm.end(), 0.0) / n;
    if (samples_dbm.size() == 1) return {mean, std::nullopt};

    double ss = 0.0;
    for (double v : samples_dbm) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n)};
}

}  // namespace scatter_sense
