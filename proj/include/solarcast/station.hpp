#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "solarcast/errors.hpp"

namespace solarcast {

/// Geographic identity of a measurement site.
struct StationMeta {
    std::string name;
    double latitude_deg = 0.0;   // [-90, 90], north positive
    double longitude_deg = 0.0;  // [-180, 180], east positive
    double altitude_m = 0.0;
    double utc_offset_h = 0.0;   // [-12, 14], fixed offset, no DST

    StationMeta() = default;

    StationMeta(std::string name_, double lat, double lon, double alt,
                double utc)
        : name(std::move(name_)),
          latitude_deg(lat),
          longitude_deg(lon),
          altitude_m(alt),
          utc_offset_h(utc) {
        if (lat < -90.0 || lat > 90.0)
            throw InputError("latitude out of [-90, 90]: " + std::to_string(lat));
        if (lon < -180.0 || lon > 180.0)
            throw InputError("longitude out of [-180, 180]: " +
                             std::to_string(lon));
        if (alt < 0.0) throw InputError("altitude must be >= 0");
        if (utc < -12.0 || utc > 14.0)
            throw InputError("utc offset out of [-12, 14]");
        if (name.empty()) throw InputError("station name must be non-empty");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw InputError(std::string("malformed number for ") + what + ": '" +
                         std::string(s) + "'");
    return v;
}

/// `key = value` lines, '#' comments, blank lines skipped.
/// Calls sink(key, value) per entry.
template <typename Sink>
void parse_key_values(std::istream& in, Sink&& sink) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(lineno, "expected 'key = value'");
        const std::string_view key = trim(sv.substr(0, eq));
        const std::string_view value = trim(sv.substr(eq + 1));
        if (key.empty()) throw ParseError(lineno, "empty key");
        sink(key, value, lineno);
    }
}

}  // namespace detail

/// Keys: name, latitude_deg, longitude_deg, altitude_m, utc_offset_h.
inline StationMeta load_station_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open station file: " + path.string());
    std::string name;
    double lat = 0, lon = 0, alt = 0, utc = 0;
    bool have_name = false, have_lat = false, have_lon = false,
         have_alt = false, have_utc = false;
    detail::parse_key_values(in, [&](std::string_view key, std::string_view value,
                                     std::size_t lineno) {
        if (key == "name") {
            name = std::string(value);
            have_name = true;
        } else if (key == "latitude_deg") {
            lat = detail::parse_double(value, "latitude_deg");
            have_lat = true;
        } else if (key == "longitude_deg") {
            lon = detail::parse_double(value, "longitude_deg");
            have_lon = true;
        } else if (key == "altitude_m") {
            alt = detail::parse_double(value, "altitude_m");
            have_alt = true;
        } else if (key == "utc_offset_h") {
            utc = detail::parse_double(value, "utc_offset_h");
            have_utc = true;
        } else {
            throw ParseError(lineno, "unknown station key: " + std::string(key));
        }
    });
    if (!(have_name && have_lat && have_lon && have_alt && have_utc))
        throw InputError("station file missing required keys (name, "
                         "latitude_deg, longitude_deg, altitude_m, utc_offset_h)");
    return StationMeta(name, lat, lon, alt, utc);
}

}  // namespace solarcast
