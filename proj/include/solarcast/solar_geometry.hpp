#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "solarcast/civil_time.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/station.hpp"

namespace solarcast {

inline constexpr double kSolarConstantWm2 = 1367.0;

inline constexpr double deg_to_rad(double d) {
    return d * std::numbers::pi / 180.0;
}
inline constexpr double rad_to_deg(double r) {
    return r * 180.0 / std::numbers::pi;
}

/// Sun geometry at one instant. Angles in radians; elevation is negative when
/// the sun is below the horizon.
struct SolarPosition {
    double elevation;
    double declination;
    double hour_angle;
    double eccentricity_factor;
};

namespace detail {

inline void check_day_of_year(int n) {
    if (n < 1 || n > 366)
        throw InputError("day_of_year out of 1..366: " + std::to_string(n));
}

/// Wrap to 1..365 so day 366 reuses day 1; makes the 365-day formulas
/// bit-exactly periodic.
inline int wrap_day(int n) { return (n - 1) % 365 + 1; }

}  // namespace detail

/// Solar declination, radians. Cooper (1969): 23.45 deg * sin(2*pi*(284+n)/365).
inline double declination(int day_of_year) {
    detail::check_day_of_year(day_of_year);
    const int n = detail::wrap_day(day_of_year);
    return deg_to_rad(23.45) *
           std::sin(2.0 * std::numbers::pi * (284.0 + n) / 365.0);
}

/// Sun-earth distance correction E0 = 1 + 0.033 cos(2*pi*n/365).
inline double eccentricity_factor(int day_of_year) {
    detail::check_day_of_year(day_of_year);
    const int n = detail::wrap_day(day_of_year);
    return 1.0 + 0.033 * std::cos(2.0 * std::numbers::pi * n / 365.0);
}

/// Equation of time in minutes, Spencer (1971) Fourier series. Range is about
/// [-14.3, +16.4] over the year.
inline double equation_of_time_minutes(int day_of_year) {
    detail::check_day_of_year(day_of_year);
    const int n = detail::wrap_day(day_of_year);
    const double b = 2.0 * std::numbers::pi * (n - 1) / 365.0;
    return 229.18 *
           (0.000075 + 0.001868 * std::cos(b) - 0.032077 * std::sin(b) -
            0.014615 * std::cos(2.0 * b) - 0.04089 * std::sin(2.0 * b));
}

/// True solar time in decimal hours: clock time corrected by the longitude
/// offset from the zone meridian and the equation of time.
inline double true_solar_time_hours(const StationMeta& station,
                                    const CivilDateTime& t) {
    const int n = day_of_year(t);
    return decimal_hours(t) + equation_of_time_minutes(n) / 60.0 +
           (station.longitude_deg - 15.0 * station.utc_offset_h) / 15.0;
}

/// sin h = sin(lat) sin(decl) + cos(lat) cos(decl) cos(omega), with the hour
/// angle omega zero at solar noon and positive in the afternoon.
inline SolarPosition solar_position(const StationMeta& station,
                                    const CivilDateTime& t) {
    validate_datetime(t);
    const int n = day_of_year(t);
    const double decl = declination(n);
    const double omega =
        deg_to_rad(15.0 * (true_solar_time_hours(station, t) - 12.0));
    const double lat = deg_to_rad(station.latitude_deg);
    const double sin_h = std::sin(lat) * std::sin(decl) +
                         std::cos(lat) * std::cos(decl) * std::cos(omega);
    SolarPosition pos;
    pos.elevation = std::asin(std::clamp(sin_h, -1.0, 1.0));
    pos.declination = decl;
    pos.hour_angle = omega;
    pos.eccentricity_factor = eccentricity_factor(n);
    return pos;
}

/// Extraterrestrial irradiation on the horizontal over [t, t+1h), Wh/m2.
/// Midpoint-rule: I0 = Gsc * E0 * sin(h) at the half hour, clamped at night.
inline double extraterrestrial_hourly(const StationMeta& station,
                                      const CivilDateTime& hour_start,
                                      double gsc = kSolarConstantWm2) {
    validate_datetime(hour_start);
    if (hour_start.minute != 0 || hour_start.second != 0)
        throw InputError("hour interval must start on the hour");
    CivilDateTime mid = hour_start;
    mid.minute = 30;
    const SolarPosition pos = solar_position(station, mid);
    const double sin_h = std::sin(pos.elevation);
    if (sin_h <= 0.0) return 0.0;
    return gsc * pos.eccentricity_factor * sin_h;
}

/// Daily extraterrestrial irradiation H0, Wh/m2 (Duffie & Beckman eq. 1.10.3):
/// H0 = (24/pi) Gsc E0 [cos(lat) cos(decl) sin(ws) + ws sin(lat) sin(decl)],
/// sunset hour angle ws clamped for polar day (pi) and polar night (0).
inline double extraterrestrial_daily(const StationMeta& station,
                                     int day_of_year,
                                     double gsc = kSolarConstantWm2) {
    const double decl = declination(day_of_year);
    const double e0 = eccentricity_factor(day_of_year);
    const double lat = deg_to_rad(station.latitude_deg);
    const double cos_ws = std::clamp(-std::tan(lat) * std::tan(decl), -1.0, 1.0);
    const double ws = std::acos(cos_ws);
    const double h0 = (24.0 / std::numbers::pi) * gsc * e0 *
                      (std::cos(lat) * std::cos(decl) * std::sin(ws) +
                       ws * std::sin(lat) * std::sin(decl));
    return std::max(h0, 0.0);
}

}  // namespace solarcast
