#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/metrics.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/preprocessing.hpp"
#include "solarcast/series.hpp"

namespace solarcast {

/// The three prediction techniques compared on a target series: an MLP
/// trained elsewhere, an MLP trained on local history, and persistence.
enum class ForecasterKind { ann_remote, ann_local, persistence };

inline std::string_view forecaster_name(ForecasterKind k) {
    switch (k) {
        case ForecasterKind::ann_remote: return "ann_remote";
        case ForecasterKind::ann_local: return "ann_local";
        default: return "persistence";
    }
}

struct SupervisedSet {
    Cadence cadence = Cadence::daily;
    std::vector<TrainingSample> samples;
};

struct ForecastPoint {
    CivilDateTime time;
    double predicted = 0.0;  // Wh/m2
    double measured = 0.0;   // Wh/m2
};

/// Paired predictions and measurements on a common timestamp grid.
struct ForecastSeries {
    Cadence cadence = Cadence::daily;
    ForecasterKind kind = ForecasterKind::persistence;
    std::vector<ForecastPoint> points;
};

struct ForecastOptions {
    double elevation_cutoff_deg = kDefaultElevationCutoffDeg;
    bool clamp_output = true;       // bound predictions to [0, k_max]
    bool smart_persistence = false; // persist clearness instead of irradiation
    double gsc = kSolarConstantWm2;
};

/// Sliding 8-lag windows over contiguous runs of measured points. A window
/// needs 9 consecutive valid slots; hourly runs are daylight runs because
/// stationarize marked below-cutoff hours missing.
inline SupervisedSet make_windows(const ClearnessSeries& k_series,
                                  const NormParams& norm) {
    SupervisedSet set;
    set.cadence = k_series.cadence;
    std::size_t run = 0;
    for (std::size_t i = 0; i < k_series.points.size(); ++i) {
        if (k_series.points[i].quality == Quality::measured)
            ++run;
        else
            run = 0;
        if (run < kNumInputs + 1) continue;
        TrainingSample sample;
        sample.target_time = k_series.points[i].time;
        for (std::size_t lag = 0; lag < kNumInputs; ++lag)
            sample.inputs[lag] =
                normalize(k_series.points[i - kNumInputs + lag].k, norm);
        sample.target = normalize(k_series.points[i].k, norm);
        set.samples.push_back(sample);
    }
    return set;
}

namespace detail {

/// Valid slots for the persistence pairing: measured, and in daylight for
/// hourly cadence (same midpoint-elevation rule as stationarize).
inline std::vector<bool> persistence_mask(const IrradiationSeries& series,
                                          double cutoff_deg) {
    std::vector<bool> ok(series.points.size());
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const SeriesPoint& p = series.points[i];
        if (p.quality != Quality::measured) continue;
        if (series.cadence == Cadence::hourly &&
            hourly_below_cutoff(series.station, p.time, cutoff_deg))
            continue;
        ok[i] = true;
    }
    return ok;
}

}  // namespace detail

/// Naive baseline: yhat(t+1) = y(t) for every pair of consecutive valid
/// points, in raw physical units. The smart variant persists the clearness
/// index and rescales by the target slot's extraterrestrial ceiling.
inline ForecastSeries persistence_forecast(const IrradiationSeries& series,
                                           const ForecastOptions& opts = {}) {
    ForecastSeries out;
    out.cadence = series.cadence;
    out.kind = ForecasterKind::persistence;
    const std::vector<bool> ok =
        detail::persistence_mask(series, opts.elevation_cutoff_deg);
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        if (!ok[i] || !ok[i - 1]) continue;
        const SeriesPoint& prev = series.points[i - 1];
        const SeriesPoint& cur = series.points[i];
        double predicted = prev.value;
        if (opts.smart_persistence) {
            const double s_prev = detail::stationarization_divisor(
                series.station, prev.time, series.cadence, opts.gsc);
            const double s_cur = detail::stationarization_divisor(
                series.station, cur.time, series.cadence, opts.gsc);
            if (s_prev <= 0.0) continue;
            predicted = prev.value / s_prev * s_cur;
        }
        out.points.push_back({cur.time, predicted, cur.value});
    }
    return out;
}

/// End-to-end MLP forecast on a target series: stationarize with the target
/// station's geometry, normalize with the model's training-site extrema, run
/// the network, then invert both transforms. Inputs beyond the training range
/// are fed unclamped; the optional output clamp bounds predictions instead.
inline ForecastSeries ann_forecast(const MlpModel& model,
                                   const IrradiationSeries& target,
                                   const ForecastOptions& opts = {}) {
    const Cadence model_cadence = model.cadence;
    if (model_cadence != target.cadence)
        throw SchemaError("model cadence does not match target series cadence");
    if (target.station.name.empty())
        throw InputError("target series lacks station metadata");

    const ClearnessSeries k_target =
        stationarize(target, opts.elevation_cutoff_deg, opts.gsc);
    const SupervisedSet windows = make_windows(k_target, model.norm);

    ForecastSeries out;
    out.cadence = target.cadence;
    out.kind = model.train_station == target.station.name
                   ? ForecasterKind::ann_local
                   : ForecasterKind::ann_remote;
    out.points.reserve(windows.samples.size());
    const std::int64_t first_slot =
        target.points.empty() ? 0 : slot_index(target.points.front().time,
                                               target.cadence);
    for (const TrainingSample& sample : windows.samples) {
        const double y = detail::forward_unchecked(model, sample.inputs);
        double k_hat = denormalize(y, model.norm);
        if (opts.clamp_output) k_hat = clamp_output(k_hat, model.norm);
        const double divisor = detail::stationarization_divisor(
            target.station, sample.target_time, target.cadence, opts.gsc);
        const std::size_t idx = static_cast<std::size_t>(
            slot_index(sample.target_time, target.cadence) - first_slot);
        out.points.push_back(
            {sample.target_time, k_hat * divisor, target.points[idx].value});
    }
    return out;
}

inline std::vector<Observation> to_observations(const ForecastSeries& f) {
    std::vector<Observation> out(f.points.size());
    for (std::size_t i = 0; i < f.points.size(); ++i)
        out[i] = {f.points[i].measured, f.points[i].predicted};
    return out;
}

struct TrainedForecaster {
    MlpModel model;
    TrainReport report;
};

/// Stationarize, fit the normalization extrema, window, train; stamps the
/// preprocessing metadata into the returned model.
inline TrainedForecaster train_forecaster(const IrradiationSeries& series,
                                          const TrainConfig& cfg,
                                          const ForecastOptions& opts = {}) {
    const ClearnessSeries k = stationarize(series, opts.elevation_cutoff_deg,
                                           opts.gsc);
    const NormParams norm = fit_norm(k);
    const SupervisedSet set = make_windows(k, norm);
    auto [model, report] = train(set.samples, cfg);
    model.norm = norm;
    model.mode = k.mode;
    model.cadence = k.cadence;
    model.train_station = series.station.name;
    return {std::move(model), std::move(report)};
}

struct AbcOptions {
    TrainConfig train;
    ForecastOptions forecast;
    NrmseDivisor divisor = NrmseDivisor::mean;
    int bootstrap_resamples = 1000;
    std::uint64_t metrics_seed = 0;
};

struct AbcResult {
    EvaluationReport report_a, report_b, report_c;
    ForecastSeries forecast_a, forecast_b, forecast_c;
    TrainReport train_a, train_b;
    bool target_overlaps_training = false;
};

namespace detail {

inline bool spans_overlap(const IrradiationSeries& a,
                          const IrradiationSeries& b) {
    if (a.points.empty() || b.points.empty()) return false;
    return !(a.points.back().time < b.points.front().time ||
             b.points.back().time < a.points.front().time);
}

/// Restrict every series to the timestamps all of them can predict, so the
/// methods' different warm-up needs cannot bias the comparison.
inline void restrict_to_common_times(std::vector<ForecastSeries*> all) {
    std::vector<CivilDateTime> common;
    for (std::size_t s = 0; s < all.size(); ++s) {
        std::vector<CivilDateTime> times;
        times.reserve(all[s]->points.size());
        for (const ForecastPoint& p : all[s]->points) times.push_back(p.time);
        if (s == 0) {
            common = std::move(times);
        } else {
            std::vector<CivilDateTime> merged;
            std::set_intersection(common.begin(), common.end(), times.begin(),
                                  times.end(), std::back_inserter(merged));
            common = std::move(merged);
        }
    }
    for (ForecastSeries* f : all) {
        std::vector<ForecastPoint> kept;
        kept.reserve(common.size());
        for (const ForecastPoint& p : f->points)
            if (std::binary_search(common.begin(), common.end(), p.time))
                kept.push_back(p);
        f->points = std::move(kept);
    }
}

}  // namespace detail

/// The relocation experiment: model A trained on the remote station, model B
/// on local history, persistence as case C, all scored on the identical set
/// of evaluable timestamps of the target series.
inline AbcResult run_abc_experiment(const IrradiationSeries& train_remote,
                                    const IrradiationSeries& train_local,
                                    const IrradiationSeries& target,
                                    const AbcOptions& opts = {}) {
    if (train_remote.cadence != target.cadence ||
        train_local.cadence != target.cadence)
        throw SchemaError("A/B/C experiment requires one common cadence");

    AbcResult result;
    result.target_overlaps_training =
        detail::spans_overlap(train_remote, target) ||
        detail::spans_overlap(train_local, target);

    TrainedForecaster a = train_forecaster(train_remote, opts.train, opts.forecast);
    TrainedForecaster b = train_forecaster(train_local, opts.train, opts.forecast);
    result.train_a = std::move(a.report);
    result.train_b = std::move(b.report);

    result.forecast_a = ann_forecast(a.model, target, opts.forecast);
    result.forecast_b = ann_forecast(b.model, target, opts.forecast);
    result.forecast_c = persistence_forecast(target, opts.forecast);
    result.forecast_a.kind = ForecasterKind::ann_remote;
    result.forecast_b.kind = ForecasterKind::ann_local;
    detail::restrict_to_common_times(
        {&result.forecast_a, &result.forecast_b, &result.forecast_c});

    const std::string target_name = target.station.name;
    result.report_a = evaluate_pairs(to_observations(result.forecast_a),
                                     std::string(forecaster_name(ForecasterKind::ann_remote)),
                                     target_name, opts.metrics_seed, opts.divisor,
                                     opts.bootstrap_resamples);
    result.report_b = evaluate_pairs(to_observations(result.forecast_b),
                                     std::string(forecaster_name(ForecasterKind::ann_local)),
                                     target_name, opts.metrics_seed, opts.divisor,
                                     opts.bootstrap_resamples);
    result.report_c = evaluate_pairs(to_observations(result.forecast_c),
                                     std::string(forecaster_name(ForecasterKind::persistence)),
                                     target_name, opts.metrics_seed, opts.divisor,
                                     opts.bootstrap_resamples);
    return result;
}

/// Plot-ready per-point output: timestamp,measured_wh_m2,predicted_wh_m2,forecaster.
inline void write_forecast_csv(const ForecastSeries& f, std::ostream& out) {
    out << "timestamp,measured_wh_m2,predicted_wh_m2,forecaster\n";
    const std::string_view tag = forecaster_name(f.kind);
    for (const ForecastPoint& p : f.points) {
        out << (f.cadence == Cadence::hourly ? format_datetime(p.time)
                                             : format_date(p.time))
            << ',' << detail::format_value(p.measured) << ','
            << detail::format_value(p.predicted) << ',' << tag << '\n';
    }
}

inline void write_forecast_csv(const ForecastSeries& f,
                               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write forecast file: " + path.string());
    write_forecast_csv(f, out);
}

}  // namespace solarcast
