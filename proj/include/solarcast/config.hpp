#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "solarcast/errors.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/pv.hpp"
#include "solarcast/station.hpp"
#include "solarcast/synthesis.hpp"

namespace solarcast {

/// Every pipeline knob with its default. Parsed from a `key = value` file;
/// command-line flags override file values; unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 42;
    double solar_constant_w_m2 = kSolarConstantWm2;
    double elevation_cutoff_deg = kDefaultElevationCutoffDeg;

    // training
    double learning_rate = 0.01;
    double momentum = 0.9;
    int max_epochs = 2000;
    int patience = 50;
    double split_fraction = 0.8;

    // metrics
    std::string nrmse_divisor = "mean";
    int bootstrap_resamples = 1000;

    // forecasting
    bool clamp_output = true;
    bool smart_persistence = false;

    // pv chain
    double ratio_cap = kDefaultRatioCap;
    double albedo = 0.2;

    // synthetic generator
    double synth_mean_clearness = 0.7;
    double synth_rho = 0.8;
    double synth_sigma = 0.1;
    double synth_station_sigma = 0.0;
    double synth_station_bias = 0.0;

    TrainConfig train_config() const {
        TrainConfig cfg;
        cfg.learning_rate = learning_rate;
        cfg.momentum = momentum;
        cfg.max_epochs = max_epochs;
        cfg.patience = patience;
        cfg.split_fraction = split_fraction;
        cfg.seed = seed;
        return cfg;
    }

    ForecastOptions forecast_options() const {
        ForecastOptions opts;
        opts.elevation_cutoff_deg = elevation_cutoff_deg;
        opts.clamp_output = clamp_output;
        opts.smart_persistence = smart_persistence;
        opts.gsc = solar_constant_w_m2;
        return opts;
    }

    SynthesisParams synthesis_params() const {
        SynthesisParams p;
        p.mean_clearness = synth_mean_clearness;
        p.rho = synth_rho;
        p.sigma = synth_sigma;
        p.station_sigma = synth_station_sigma;
        p.station_bias = synth_station_bias;
        return p;
    }

    ClearSkyOptions clear_sky_options() const {
        return ClearSkyOptions{albedo, solar_constant_w_m2};
    }
};

namespace detail {

inline bool parse_bool(std::string_view v, const char* what) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw InputError(std::string("expected true/false for ") + what);
}

inline int parse_int(std::string_view v, const char* what) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InputError(std::string("malformed integer for ") + what);
    return out;
}

inline std::uint64_t parse_u64(std::string_view v, const char* what) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw InputError(std::string("malformed unsigned integer for ") + what);
    return out;
}

}  // namespace detail

inline RunConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    RunConfig cfg;
    detail::parse_key_values(in, [&](std::string_view key, std::string_view v,
                                     std::size_t lineno) {
        try {
            if (key == "seed") cfg.seed = detail::parse_u64(v, "seed");
            else if (key == "solar_constant_w_m2")
                cfg.solar_constant_w_m2 = detail::parse_double(v, "solar_constant_w_m2");
            else if (key == "elevation_cutoff_deg")
                cfg.elevation_cutoff_deg = detail::parse_double(v, "elevation_cutoff_deg");
            else if (key == "learning_rate")
                cfg.learning_rate = detail::parse_double(v, "learning_rate");
            else if (key == "momentum")
                cfg.momentum = detail::parse_double(v, "momentum");
            else if (key == "max_epochs")
                cfg.max_epochs = detail::parse_int(v, "max_epochs");
            else if (key == "patience")
                cfg.patience = detail::parse_int(v, "patience");
            else if (key == "split_fraction")
                cfg.split_fraction = detail::parse_double(v, "split_fraction");
            else if (key == "nrmse_divisor") {
                parse_nrmse_divisor(v);  // validate
                cfg.nrmse_divisor = std::string(v);
            } else if (key == "bootstrap_resamples")
                cfg.bootstrap_resamples = detail::parse_int(v, "bootstrap_resamples");
            else if (key == "clamp_output")
                cfg.clamp_output = detail::parse_bool(v, "clamp_output");
            else if (key == "smart_persistence")
                cfg.smart_persistence = detail::parse_bool(v, "smart_persistence");
            else if (key == "ratio_cap")
                cfg.ratio_cap = detail::parse_double(v, "ratio_cap");
            else if (key == "albedo")
                cfg.albedo = detail::parse_double(v, "albedo");
            else if (key == "synth_mean_clearness")
                cfg.synth_mean_clearness = detail::parse_double(v, "synth_mean_clearness");
            else if (key == "synth_rho")
                cfg.synth_rho = detail::parse_double(v, "synth_rho");
            else if (key == "synth_sigma")
                cfg.synth_sigma = detail::parse_double(v, "synth_sigma");
            else if (key == "synth_station_sigma")
                cfg.synth_station_sigma = detail::parse_double(v, "synth_station_sigma");
            else if (key == "synth_station_bias")
                cfg.synth_station_bias = detail::parse_double(v, "synth_station_bias");
            else
                throw InputError("unknown config key: " + std::string(key));
        } catch (const InputError& e) {
            throw ParseError(lineno, e.what());
        }
    });
    return cfg;
}

}  // namespace solarcast
