#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "solarcast/civil_time.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/station.hpp"

namespace solarcast {

enum class Cadence { hourly, daily };

enum class Quality { measured, missing };

inline std::string_view cadence_name(Cadence c) {
    return c == Cadence::hourly ? "hourly" : "daily";
}

inline Cadence parse_cadence(std::string_view s) {
    if (s == "hourly") return Cadence::hourly;
    if (s == "daily") return Cadence::daily;
    throw InputError("cadence must be 'hourly' or 'daily', got '" +
                     std::string(s) + "'");
}

struct SeriesPoint {
    CivilDateTime time;
    double value = std::numeric_limits<double>::quiet_NaN();  // Wh/m2
    Quality quality = Quality::missing;
};

/// Uniformly gridded global horizontal irradiation. Missing slots are present
/// with quality=missing; timestamps are strictly increasing by one cadence
/// step. Immutable by convention once built.
struct IrradiationSeries {
    StationMeta station;
    Cadence cadence = Cadence::daily;
    std::vector<SeriesPoint> points;
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t gaps_inserted = 0;
    std::size_t qc_violations = 0;
};

inline std::int64_t slot_index(const CivilDateTime& t, Cadence c) {
    return c == Cadence::hourly ? hours_since_epoch(t) : days_since_epoch(t);
}

inline CivilDateTime advance_slots(const CivilDateTime& t, Cadence c,
                                   std::int64_t n) {
    return c == Cadence::hourly ? add_hours(t, n) : add_days(t, n);
}

/// Upper bound a measured value may take, 1.2x the extraterrestrial ceiling.
inline double qc_ceiling(const StationMeta& station, const CivilDateTime& t,
                         Cadence c, double gsc = kSolarConstantWm2) {
    const double extraterrestrial =
        c == Cadence::hourly ? extraterrestrial_hourly(station, t, gsc)
                             : extraterrestrial_daily(station, day_of_year(t), gsc);
    return 1.2 * extraterrestrial;
}

namespace detail {

inline CivilDateTime parse_slot_timestamp(std::string_view text, Cadence cadence,
                                          std::size_t lineno) {
    CivilDateTime t;
    try {
        t = parse_datetime(text);
    } catch (const InputError& e) {
        throw ParseError(lineno, e.what());
    }
    if (cadence == Cadence::hourly) {
        if (t.minute != 0 || t.second != 0)
            throw SchemaError("line " + std::to_string(lineno) +
                              ": hourly timestamp not aligned to the hour");
    } else {
        if (t.hour != 0 || t.minute != 0 || t.second != 0)
            throw SchemaError("line " + std::to_string(lineno) +
                              ": daily timestamp must be a bare date");
    }
    return t;
}

inline std::string format_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the `timestamp,ghi_wh_m2` schema: ISO-8601 local timestamps, values
/// either a non-negative decimal or NA, one row per cadence slot. Gaps are
/// materialized as missing points; measured values above the QC ceiling are
/// demoted to missing and counted.
inline std::pair<IrradiationSeries, IngestReport> load_csv(
    std::istream& in, const StationMeta& station, Cadence cadence,
    double gsc = kSolarConstantWm2) {
    IrradiationSeries series;
    series.station = station;
    series.cadence = cadence;
    IngestReport report;

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,ghi_wh_m2")
        throw ParseError(1, "header must be 'timestamp,ghi_wh_m2'");

    bool have_prev = false;
    std::int64_t prev_slot = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(lineno, "expected two comma-separated fields");
        if (line.find(',', comma + 1) != std::string::npos)
            throw ParseError(lineno, "expected exactly two fields");
        const std::string_view ts_text =
            std::string_view(line).substr(0, comma);
        const std::string_view value_text =
            std::string_view(line).substr(comma + 1);

        const CivilDateTime t =
            detail::parse_slot_timestamp(ts_text, cadence, lineno);
        const std::int64_t slot = slot_index(t, cadence);
        if (have_prev) {
            if (slot == prev_slot)
                throw SchemaError("line " + std::to_string(lineno) +
                                  ": duplicate timestamp " + std::string(ts_text));
            if (slot < prev_slot)
                throw SchemaError("line " + std::to_string(lineno) +
                                  ": non-monotone timestamp " +
                                  std::string(ts_text));
            for (std::int64_t missing = prev_slot + 1; missing < slot; ++missing) {
                SeriesPoint gap;
                gap.time = advance_slots(series.points.back().time, cadence, 1);
                series.points.push_back(gap);
                ++report.gaps_inserted;
            }
        }

        ++report.rows_read;
        SeriesPoint point;
        point.time = t;
        if (value_text == "NA") {
            point.quality = Quality::missing;
        } else {
            double v = 0.0;
            auto [ptr, ec] =
                std::from_chars(value_text.data(),
                                value_text.data() + value_text.size(), v);
            if (ec != std::errc{} ||
                ptr != value_text.data() + value_text.size() || !std::isfinite(v))
                throw ParseError(lineno, "malformed value '" +
                                             std::string(value_text) + "'");
            if (v < 0.0)
                throw ParseError(lineno, "negative irradiation value");
            if (v > qc_ceiling(station, t, cadence, gsc)) {
                point.quality = Quality::missing;
                ++report.qc_violations;
            } else {
                point.value = v;
                point.quality = Quality::measured;
                ++report.rows_accepted;
            }
        }
        series.points.push_back(point);
        prev_slot = slot;
        have_prev = true;
    }
    return {std::move(series), report};
}

inline std::pair<IrradiationSeries, IngestReport> load_csv(
    const std::filesystem::path& path, const StationMeta& station,
    Cadence cadence, double gsc = kSolarConstantWm2) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file: " + path.string());
    return load_csv(in, station, cadence, gsc);
}

/// Byte-stable emission: shortest round-trip decimals, NA for missing slots,
/// LF line endings. Daily rows are bare dates.
inline void write_csv(const IrradiationSeries& series, std::ostream& out) {
    out << "timestamp,ghi_wh_m2\n";
    for (const SeriesPoint& p : series.points) {
        out << (series.cadence == Cadence::hourly ? format_datetime(p.time)
                                                  : format_date(p.time));
        out << ',';
        if (p.quality == Quality::measured)
            out << detail::format_value(p.value);
        else
            out << "NA";
        out << '\n';
    }
}

inline void write_csv(const IrradiationSeries& series,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write series file: " + path.string());
    write_csv(series, out);
}

}  // namespace solarcast
