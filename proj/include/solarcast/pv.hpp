#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "solarcast/forecast.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/station.hpp"

namespace solarcast {

/// The fixed-tilt PV subsystem: constant-efficiency conversion over a usable
/// area, frontage-mounted (steep tilt, facing south by default).
struct PvPlant {
    double efficiency = 0.13;
    double area_m2 = 10.125;
    double tilt_deg = 80.0;
    double azimuth_deg = 0.0;  // from south, west positive
    StationMeta station;

    PvPlant() = default;

    PvPlant(double eff, double area, double tilt, double azimuth,
            StationMeta station_)
        : efficiency(eff),
          area_m2(area),
          tilt_deg(tilt),
          azimuth_deg(azimuth),
          station(std::move(station_)) {
        if (!(eff > 0.0 && eff < 1.0))
            throw InputError("efficiency must be in (0, 1)");
        if (!(area > 0.0)) throw InputError("area must be positive");
        if (tilt < 0.0 || tilt > 90.0)
            throw InputError("tilt must be in [0, 90] degrees");
        if (azimuth < -180.0 || azimuth > 180.0)
            throw InputError("azimuth must be in [-180, 180] degrees");
    }
};

struct ClearSkyOptions {
    double albedo = 0.2;  // ground reflectance for the tilted plane
    double gsc = kSolarConstantWm2;
};

/// Instantaneous clear-sky decomposition, W/m2.
struct ClearSkyComponents {
    double beam_normal = 0.0;
    double diffuse_horizontal = 0.0;
    double global_horizontal = 0.0;
    double sin_elevation = 0.0;
};

namespace detail {

/// Hottel (1976) beam transmittance for the 23 km standard atmosphere,
/// altitude-corrected; diffuse via the Liu-Jordan companion relation
/// tau_d = 0.271 - 0.294 tau_b.
inline ClearSkyComponents hottel_components(const StationMeta& station,
                                            const CivilDateTime& t,
                                            const ClearSkyOptions& opts) {
    ClearSkyComponents c;
    const SolarPosition pos = solar_position(station, t);
    const double sin_h = std::sin(pos.elevation);
    if (sin_h <= 0.0) return c;
    const double a_km = std::min(station.altitude_m / 1000.0, 2.5);
    const double a0 = 0.4237 - 0.00821 * (6.0 - a_km) * (6.0 - a_km);
    const double a1 = 0.5055 + 0.00595 * (6.5 - a_km) * (6.5 - a_km);
    const double k = 0.2711 + 0.01858 * (2.5 - a_km) * (2.5 - a_km);
    const double tau_b = a0 + a1 * std::exp(-k / sin_h);
    const double tau_d = 0.271 - 0.294 * tau_b;
    const double extraterrestrial_normal = opts.gsc * pos.eccentricity_factor;
    c.beam_normal = extraterrestrial_normal * tau_b;
    c.diffuse_horizontal = extraterrestrial_normal * tau_d * sin_h;
    c.global_horizontal = c.beam_normal * sin_h + c.diffuse_horizontal;
    c.sin_elevation = sin_h;
    return c;
}

/// Cosine of the beam incidence angle on a plane tilted `tilt` from the
/// horizontal with azimuth measured from south (west positive). Built from
/// the solar unit vector in (south, west, up) coordinates.
inline double cos_incidence(const StationMeta& station, const SolarPosition& pos,
                            double tilt_rad, double azimuth_rad) {
    const double lat = deg_to_rad(station.latitude_deg);
    const double sin_d = std::sin(pos.declination);
    const double cos_d = std::cos(pos.declination);
    const double cos_w = std::cos(pos.hour_angle);
    const double sun_up = std::sin(pos.elevation);
    const double sun_south = cos_d * cos_w * std::sin(lat) - sin_d * std::cos(lat);
    const double sun_west = cos_d * std::sin(pos.hour_angle);
    const double sin_b = std::sin(tilt_rad);
    const double cos_b = std::cos(tilt_rad);
    return sin_b * std::cos(azimuth_rad) * sun_south +
           sin_b * std::sin(azimuth_rad) * sun_west + cos_b * sun_up;
}

}  // namespace detail

/// Clear-sky global horizontal irradiance, W/m2, zero below the horizon.
inline double clear_sky_horizontal(const StationMeta& station,
                                   const CivilDateTime& t,
                                   const ClearSkyOptions& opts = {}) {
    return detail::hottel_components(station, t, opts).global_horizontal;
}

/// Clear-sky irradiance on the tilted plane: beam projected by the incidence
/// angle (zero when the sun is behind the plane), isotropic diffuse, and
/// ground reflection.
inline double clear_sky_tilted(const StationMeta& station,
                               const CivilDateTime& t, const PvPlant& plant,
                               const ClearSkyOptions& opts = {}) {
    const ClearSkyComponents c = detail::hottel_components(station, t, opts);
    if (c.sin_elevation <= 0.0) return 0.0;
    const SolarPosition pos = solar_position(station, t);
    const double tilt = deg_to_rad(plant.tilt_deg);
    const double cos_theta = detail::cos_incidence(
        station, pos, tilt, deg_to_rad(plant.azimuth_deg));
    const double beam = c.beam_normal * std::max(cos_theta, 0.0);
    const double diffuse = c.diffuse_horizontal * (1.0 + std::cos(tilt)) / 2.0;
    const double reflected =
        opts.albedo * c.global_horizontal * (1.0 - std::cos(tilt)) / 2.0;
    return beam + diffuse + reflected;
}

/// Tilted-to-horizontal clear-sky ratio, zero when the clear-sky horizontal
/// irradiance is zero.
inline double clear_sky_ratio(const StationMeta& station, const CivilDateTime& t,
                              const PvPlant& plant,
                              const ClearSkyOptions& opts = {}) {
    const double horizontal = clear_sky_horizontal(station, t, opts);
    if (horizontal <= 0.0) return 0.0;
    return clear_sky_tilted(station, t, plant, opts) / horizontal;
}

inline constexpr double kDefaultRatioCap = 5.0;

/// Transposes hourly horizontal irradiation onto the plane of array by the
/// clear-sky ratio at each hour midpoint: I_beta = I_h * R. The cap guards
/// the low-sun blow-up of R.
inline ForecastSeries transpose_forecast(const ForecastSeries& horizontal,
                                         const PvPlant& plant,
                                         double ratio_cap = kDefaultRatioCap,
                                         const ClearSkyOptions& opts = {}) {
    if (horizontal.cadence != Cadence::hourly)
        throw SchemaError("tilt transposition is defined for hourly series only");
    if (ratio_cap <= 0.0) throw InputError("ratio cap must be positive");
    ForecastSeries out;
    out.cadence = horizontal.cadence;
    out.kind = horizontal.kind;
    out.points.reserve(horizontal.points.size());
    for (const ForecastPoint& p : horizontal.points) {
        CivilDateTime mid = p.time;
        mid.minute = 30;
        const double r =
            std::min(clear_sky_ratio(plant.station, mid, plant, opts), ratio_cap);
        out.points.push_back({p.time, p.predicted * r, p.measured * r});
    }
    return out;
}

struct PvEnergyPoint {
    CivilDateTime time;
    double i_beta_wh_m2 = 0.0;  // predicted plane-of-array irradiation
    double e_pv_wh = 0.0;       // predicted plant output
};

/// E_PV = efficiency * I_beta * area per hour.
inline std::vector<PvEnergyPoint> pv_energy(const ForecastSeries& tilted,
                                            const PvPlant& plant) {
    std::vector<PvEnergyPoint> out(tilted.points.size());
    for (std::size_t i = 0; i < tilted.points.size(); ++i) {
        const ForecastPoint& p = tilted.points[i];
        out[i] = {p.time, p.predicted,
                  plant.efficiency * p.predicted * plant.area_m2};
    }
    return out;
}

/// Keys: efficiency, area_m2, tilt_deg, azimuth_deg. Station comes separately.
inline PvPlant load_plant_file(const std::filesystem::path& path,
                               const StationMeta& station) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plant file: " + path.string());
    double eff = 0.13, area = 10.125, tilt = 80.0, azimuth = 0.0;
    detail::parse_key_values(in, [&](std::string_view key, std::string_view value,
                                     std::size_t lineno) {
        if (key == "efficiency")
            eff = detail::parse_double(value, "efficiency");
        else if (key == "area_m2")
            area = detail::parse_double(value, "area_m2");
        else if (key == "tilt_deg")
            tilt = detail::parse_double(value, "tilt_deg");
        else if (key == "azimuth_deg")
            azimuth = detail::parse_double(value, "azimuth_deg");
        else
            throw ParseError(lineno, "unknown plant key: " + std::string(key));
    });
    return PvPlant(eff, area, tilt, azimuth, station);
}

}  // namespace solarcast
