#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "solarcast/rng.hpp"
#include "solarcast/series.hpp"

namespace solarcast {

/// Clearness-index process: a regional AR(1) shared by every station built
/// from the same seed, plus independent per-station noise (an iid Gaussian
/// component and a fixed mean offset drawn once per station).
struct SynthesisParams {
    double mean_clearness = 0.7;  // process mean before clamping
    double rho = 0.8;             // AR(1) persistence, |rho| < 1
    double sigma = 0.1;           // regional innovation std
    double station_sigma = 0.0;   // per-slot station noise std
    double station_bias = 0.0;    // half-width of the per-station mean offset
};

inline constexpr double kClearnessFloor = 0.05;
inline constexpr double kClearnessCeiling = 1.0;

struct DateRange {
    CivilDateTime first;  // inclusive, date part only
    CivilDateTime last;   // inclusive
};

namespace detail {

inline void validate_synthesis_params(const SynthesisParams& p) {
    if (!(std::abs(p.rho) < 1.0))
        throw InputError("AR(1) persistence must satisfy |rho| < 1");
    if (p.sigma < 0.0 || p.station_sigma < 0.0 || p.station_bias < 0.0)
        throw InputError("noise scales must be >= 0");
    if (p.mean_clearness <= 0.0)
        throw InputError("mean_clearness must be positive");
}

/// MA horizon at which rho^J drops below 1e-14 (capped); fixes the truncation
/// of the stationary AR(1) solution so values are slot-addressable.
inline int ma_truncation(double rho) {
    const double a = std::abs(rho);
    if (a < 1e-12) return 1;
    const int j = static_cast<int>(std::ceil(std::log(1e-14) / std::log(a)));
    return std::clamp(j, 1, 8192);
}

}  // namespace detail

/// Clearness values for `count` slots starting at absolute slot index
/// `first_slot` (hours or days since epoch, per cadence). The regional AR(1)
/// is evaluated as a truncated moving average over counter-based normals, so
/// any two stations and any two overlapping spans agree where they overlap.
inline std::vector<double> clearness_path(std::uint64_t seed,
                                          std::string_view station_name,
                                          std::int64_t first_slot,
                                          std::size_t count,
                                          const SynthesisParams& params) {
    detail::validate_synthesis_params(params);
    const CounterRng regional(splitmix64(seed));
    const CounterRng station(mix_streams(seed, fnv1a64(station_name)));
    const int horizon = detail::ma_truncation(params.rho);

    std::vector<double> powers(static_cast<std::size_t>(horizon) + 1);
    powers[0] = 1.0;
    for (std::size_t j = 1; j < powers.size(); ++j)
        powers[j] = powers[j - 1] * params.rho;

    // Fixed mean offset per (seed, station), uniform in +-station_bias.
    const double bias =
        params.station_bias *
        (2.0 * unit_from_bits(mix_streams(seed ^ 0xB1A5ULL,
                                          fnv1a64(station_name))) -
         1.0);

    // Rolling window of regional innovations covering [slot-horizon, slot].
    std::vector<double> eps(powers.size());
    for (std::size_t j = 0; j < eps.size(); ++j)
        eps[j] = params.sigma == 0.0
                     ? 0.0
                     : regional.normal_at(first_slot - horizon + static_cast<std::int64_t>(j));

    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t slot = first_slot + static_cast<std::int64_t>(i);
        if (i > 0) {
            eps.erase(eps.begin());
            eps.push_back(params.sigma == 0.0 ? 0.0 : regional.normal_at(slot));
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < powers.size(); ++j)
            acc += powers[j] * eps[eps.size() - 1 - j];
        double k = params.mean_clearness + params.sigma * acc + bias;
        if (params.station_sigma > 0.0)
            k += params.station_sigma * station.normal_at(slot);
        out[i] = std::clamp(k, kClearnessFloor, kClearnessCeiling);
    }
    return out;
}

/// Deterministic synthetic series: I(t) = extraterrestrial ceiling x clearness.
/// Stand-in for measured archives; passes ingest QC by construction.
inline IrradiationSeries synthesize_station(std::uint64_t seed,
                                            const StationMeta& station,
                                            Cadence cadence,
                                            const DateRange& span,
                                            const SynthesisParams& params,
                                            double gsc = kSolarConstantWm2) {
    CivilDateTime first{span.first.year, span.first.month, span.first.day};
    CivilDateTime last{span.last.year, span.last.month, span.last.day};
    if (last < first) throw InputError("date range runs backwards");
    const std::int64_t days = days_since_epoch(last) - days_since_epoch(first) + 1;
    const std::int64_t slots = cadence == Cadence::hourly ? days * 24 : days;

    const std::int64_t first_slot = slot_index(first, cadence);
    const std::vector<double> k = clearness_path(
        seed, station.name, first_slot, static_cast<std::size_t>(slots), params);

    IrradiationSeries series;
    series.station = station;
    series.cadence = cadence;
    series.points.resize(static_cast<std::size_t>(slots));
    CivilDateTime t = first;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const double ceiling =
            cadence == Cadence::hourly
                ? extraterrestrial_hourly(station, t, gsc)
                : extraterrestrial_daily(station, day_of_year(t), gsc);
        series.points[i].time = t;
        series.points[i].value = ceiling * k[i];
        series.points[i].quality = Quality::measured;
        t = advance_slots(t, cadence, 1);
    }
    return series;
}

}  // namespace solarcast
