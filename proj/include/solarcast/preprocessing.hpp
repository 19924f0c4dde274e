#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "solarcast/series.hpp"

namespace solarcast {

enum class Stationarization { daily_extraterrestrial, hourly_extraterrestrial };

inline std::string_view stationarization_name(Stationarization s) {
    return s == Stationarization::daily_extraterrestrial
               ? "daily_extraterrestrial"
               : "hourly_extraterrestrial";
}

inline Stationarization parse_stationarization(std::string_view s) {
    if (s == "daily_extraterrestrial")
        return Stationarization::daily_extraterrestrial;
    if (s == "hourly_extraterrestrial")
        return Stationarization::hourly_extraterrestrial;
    throw InputError("unknown stationarization tag '" + std::string(s) + "'");
}

inline constexpr double kDefaultElevationCutoffDeg = 5.0;

/// Measured clearness values above this are demoted to missing; keeps the
/// ratio series physically bounded even for inputs that skipped ingest QC.
inline constexpr double kClearnessUpperBound = 1.3;

struct ClearnessPoint {
    CivilDateTime time;
    double k = std::numeric_limits<double>::quiet_NaN();
    Quality quality = Quality::missing;
};

/// Stationarized ratio series: irradiation divided by its extraterrestrial
/// ceiling. Hourly points below the elevation cutoff are missing.
struct ClearnessSeries {
    std::string station_name;
    Cadence cadence = Cadence::daily;
    Stationarization mode = Stationarization::daily_extraterrestrial;
    double elevation_cutoff_deg = kDefaultElevationCutoffDeg;
    std::vector<ClearnessPoint> points;
};

/// Min-max extrema frozen at training time; the source station matters when a
/// model is applied elsewhere.
struct NormParams {
    double k_min = 0.0;
    double k_max = 1.0;
    std::string source_station;
};

namespace detail {

/// The divisor that turns irradiation into clearness. Hourly: extraterrestrial
/// horizontal irradiation over the hour (Gsc * E0 * sin h, midpoint rule).
/// Daily: H0. Zero means the slot has no usable denominator.
inline double stationarization_divisor(const StationMeta& station,
                                       const CivilDateTime& t, Cadence cadence,
                                       double gsc) {
    return cadence == Cadence::hourly
               ? extraterrestrial_hourly(station, t, gsc)
               : extraterrestrial_daily(station, day_of_year(t), gsc);
}

inline bool hourly_below_cutoff(const StationMeta& station,
                                const CivilDateTime& hour_start,
                                double cutoff_deg) {
    CivilDateTime mid = hour_start;
    mid.minute = 30;
    return solar_position(station, mid).elevation < deg_to_rad(cutoff_deg);
}

}  // namespace detail

/// Removes the deterministic component multiplicatively. Missing inputs stay
/// missing; hourly hours with midpoint elevation below the cutoff are marked
/// missing so the divisor never vanishes under a measured point.
inline ClearnessSeries stationarize(const IrradiationSeries& series,
                                    double elevation_cutoff_deg =
                                        kDefaultElevationCutoffDeg,
                                    double gsc = kSolarConstantWm2) {
    if (series.cadence == Cadence::hourly && elevation_cutoff_deg <= 0.0)
        throw InputError("elevation cutoff must be positive for hourly series");
    ClearnessSeries out;
    out.station_name = series.station.name;
    out.cadence = series.cadence;
    out.mode = series.cadence == Cadence::hourly
                   ? Stationarization::hourly_extraterrestrial
                   : Stationarization::daily_extraterrestrial;
    out.elevation_cutoff_deg = elevation_cutoff_deg;
    out.points.resize(series.points.size());
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const SeriesPoint& p = series.points[i];
        ClearnessPoint& q = out.points[i];
        q.time = p.time;
        if (p.quality == Quality::missing) continue;
        if (series.cadence == Cadence::hourly &&
            detail::hourly_below_cutoff(series.station, p.time,
                                        elevation_cutoff_deg))
            continue;
        const double divisor = detail::stationarization_divisor(
            series.station, p.time, series.cadence, gsc);
        if (divisor <= 0.0) {
            if (series.cadence == Cadence::hourly)
                throw std::logic_error(
                    "zero stationarization divisor past the elevation cutoff");
            continue;  // polar night day: no usable denominator
        }
        const double k = p.value / divisor;
        if (k > kClearnessUpperBound) continue;
        q.k = k;
        q.quality = Quality::measured;
    }
    return out;
}

/// Exact multiplicative inverse of stationarize on measured points.
inline IrradiationSeries destationarize(const ClearnessSeries& k_series,
                                        const StationMeta& station,
                                        double gsc = kSolarConstantWm2) {
    const Cadence expected_cadence =
        k_series.mode == Stationarization::hourly_extraterrestrial
            ? Cadence::hourly
            : Cadence::daily;
    if (k_series.cadence != expected_cadence)
        throw SchemaError("clearness series cadence does not match its "
                          "stationarization mode");
    IrradiationSeries out;
    out.station = station;
    out.cadence = k_series.cadence;
    out.points.resize(k_series.points.size());
    for (std::size_t i = 0; i < k_series.points.size(); ++i) {
        const ClearnessPoint& q = k_series.points[i];
        SeriesPoint& p = out.points[i];
        p.time = q.time;
        if (q.quality == Quality::missing) continue;
        const double divisor = detail::stationarization_divisor(
            station, q.time, k_series.cadence, gsc);
        p.value = q.k * divisor;
        p.quality = Quality::measured;
    }
    return out;
}

/// Observed extrema of the measured points.
inline NormParams fit_norm(const ClearnessSeries& k_series) {
    double k_min = std::numeric_limits<double>::infinity();
    double k_max = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (const ClearnessPoint& p : k_series.points) {
        if (p.quality != Quality::measured) continue;
        k_min = std::min(k_min, p.k);
        k_max = std::max(k_max, p.k);
        ++n;
    }
    if (n < 2) throw FitError("need at least 2 measured clearness values");
    if (!(k_min < k_max))
        throw FitError("degenerate clearness series: constant value " +
                       std::to_string(k_min));
    return NormParams{k_min, k_max, k_series.station_name};
}

/// Maps [k_min, k_max] onto [-1, 1]. Inputs outside the training extrema map
/// outside [-1, 1] and are deliberately not clamped.
inline double normalize(double k, const NormParams& p) {
    return 2.0 * (k - p.k_min) / (p.k_max - p.k_min) - 1.0;
}

inline double denormalize(double x, const NormParams& p) {
    return p.k_min + (x + 1.0) * (p.k_max - p.k_min) / 2.0;
}

/// Optional output clamp for operational forecasts: [0, k_max].
inline double clamp_output(double k, const NormParams& p) {
    return std::clamp(k, 0.0, p.k_max);
}

}  // namespace solarcast
