#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "solarcast/errors.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

struct Observation {
    double measured = 0.0;
    double predicted = 0.0;
};

enum class NrmseDivisor { mean, range };

inline std::string_view nrmse_divisor_name(NrmseDivisor d) {
    return d == NrmseDivisor::mean ? "mean" : "range";
}

inline NrmseDivisor parse_nrmse_divisor(std::string_view s) {
    if (s == "mean") return NrmseDivisor::mean;
    if (s == "range") return NrmseDivisor::range;
    throw InputError("nrmse divisor must be 'mean' or 'range'");
}

inline double rmse(std::span<const Observation> pairs) {
    if (pairs.empty()) throw InputError("rmse of an empty set");
    double acc = 0.0;
    for (const Observation& o : pairs) {
        const double e = o.predicted - o.measured;
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(pairs.size()));
}

namespace detail {

inline double nrmse_normalizer(std::span<const Observation> pairs,
                               NrmseDivisor divisor) {
    if (divisor == NrmseDivisor::mean) {
        double mean = 0.0;
        for (const Observation& o : pairs) mean += o.measured;
        mean /= static_cast<double>(pairs.size());
        if (mean <= 0.0)
            throw InputError("nrmse needs a positive mean of measurements");
        return mean;
    }
    double lo = pairs[0].measured, hi = pairs[0].measured;
    for (const Observation& o : pairs) {
        lo = std::min(lo, o.measured);
        hi = std::max(hi, o.measured);
    }
    if (!(hi > lo)) throw InputError("nrmse range normalizer is zero");
    return hi - lo;
}

}  // namespace detail

/// 100 * RMSE / mean(measured) by default; range normalization optional.
inline double nrmse_percent(std::span<const Observation> pairs,
                            NrmseDivisor divisor = NrmseDivisor::mean) {
    if (pairs.empty()) throw InputError("nrmse of an empty set");
    return 100.0 * rmse(pairs) / detail::nrmse_normalizer(pairs, divisor);
}

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap: `resamples` seeded redraws with replacement, nRMSE of
/// each, 2.5th/97.5th percentiles with linear interpolation between ranks.
inline ConfidenceInterval nrmse_ci95(std::span<const Observation> pairs,
                                     std::uint64_t seed, int resamples = 1000,
                                     NrmseDivisor divisor = NrmseDivisor::mean) {
    if (pairs.size() < 30)
        throw InputError("bootstrap interval needs at least 30 pairs");
    if (resamples < 2) throw InputError("need at least 2 resamples");
    SplitMix64 rng(seed);
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<Observation> draw(pairs.size());
    for (double& stat : stats) {
        for (Observation& o : draw) o = pairs[rng.next_below(pairs.size())];
        stat = nrmse_percent(draw, divisor);
    }
    std::sort(stats.begin(), stats.end());
    auto percentile = [&](double q) {
        const double pos = q * static_cast<double>(stats.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, stats.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return stats[lo] + frac * (stats[hi] - stats[lo]);
    };
    return ConfidenceInterval{percentile(0.025), percentile(0.975)};
}

/// Pearson product-moment correlation of (measured, predicted).
inline double correlation(std::span<const Observation> pairs) {
    if (pairs.size() < 2) throw InputError("correlation needs >= 2 pairs");
    double mean_m = 0.0, mean_p = 0.0;
    for (const Observation& o : pairs) {
        mean_m += o.measured;
        mean_p += o.predicted;
    }
    mean_m /= static_cast<double>(pairs.size());
    mean_p /= static_cast<double>(pairs.size());
    double cov = 0.0, var_m = 0.0, var_p = 0.0;
    for (const Observation& o : pairs) {
        const double dm = o.measured - mean_m;
        const double dp = o.predicted - mean_p;
        cov += dm * dp;
        var_m += dm * dm;
        var_p += dp * dp;
    }
    if (var_m == 0.0 || var_p == 0.0)
        throw InputError("correlation undefined for zero variance");
    return cov / std::sqrt(var_m * var_p);
}

/// One forecaster scored against one target series.
struct EvaluationReport {
    std::size_t n = 0;
    double rmse_wh = 0.0;
    double nrmse_pct = 0.0;
    ConfidenceInterval nrmse_ci;
    double cc = 0.0;
    std::string forecaster;
    std::string target_name;
    NrmseDivisor divisor = NrmseDivisor::mean;
    int bootstrap_resamples = 1000;
    std::uint64_t seed = 0;
};

inline EvaluationReport evaluate_pairs(std::span<const Observation> pairs,
                                       std::string forecaster,
                                       std::string target_name,
                                       std::uint64_t seed,
                                       NrmseDivisor divisor = NrmseDivisor::mean,
                                       int resamples = 1000) {
    EvaluationReport r;
    r.n = pairs.size();
    r.rmse_wh = rmse(pairs);
    r.nrmse_pct = nrmse_percent(pairs, divisor);
    r.nrmse_ci = nrmse_ci95(pairs, seed, resamples, divisor);
    r.cc = correlation(pairs);
    r.forecaster = std::move(forecaster);
    r.target_name = std::move(target_name);
    r.divisor = divisor;
    r.bootstrap_resamples = resamples;
    r.seed = seed;
    return r;
}

/// Text table in the `forecaster | RMSE | nRMSE +- CI95 | CC` layout.
inline std::string render_report_table(
    std::span<const EvaluationReport> reports) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s | %12s | %-22s | %6s | %6s\n",
                  "forecaster", "RMSE (Wh/m2)", "nRMSE (%) [CI95]", "CC", "n");
    out << line;
    out << std::string(72, '-') << '\n';
    for (const EvaluationReport& r : reports) {
        char ci[48];
        std::snprintf(ci, sizeof ci, "%.2f [%.2f, %.2f]", r.nrmse_pct,
                      r.nrmse_ci.lo, r.nrmse_ci.hi);
        std::snprintf(line, sizeof line, "%-12s | %12.1f | %-22s | %6.3f | %6zu\n",
                      r.forecaster.c_str(), r.rmse_wh, ci, r.cc, r.n);
        out << line;
    }
    return out.str();
}

inline std::string report_csv_header() {
    return "forecaster,target,n,rmse_wh_m2,nrmse_pct,nrmse_ci95_lo,"
           "nrmse_ci95_hi,cc,nrmse_divisor,bootstrap_resamples,seed";
}

inline std::string report_csv_row(const EvaluationReport& r) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.9f,%s,%d,%llu",
                  r.forecaster.c_str(), r.target_name.c_str(), r.n, r.rmse_wh,
                  r.nrmse_pct, r.nrmse_ci.lo, r.nrmse_ci.hi, r.cc,
                  std::string(nrmse_divisor_name(r.divisor)).c_str(),
                  r.bootstrap_resamples,
                  static_cast<unsigned long long>(r.seed));
    return buf;
}

}  // namespace solarcast
