#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/civil_time.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/preprocessing.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

inline constexpr std::size_t kNumInputs = 8;
inline constexpr std::size_t kNumHidden = 3;

/// One supervised example: 8 normalized clearness lags and the normalized
/// clearness to predict one step ahead.
struct TrainingSample {
    CivilDateTime target_time;
    std::array<double, kNumInputs> inputs{};
    double target = 0.0;
};

/// The 8-3-1 perceptron (tanh hidden layer, linear output) together with the
/// preprocessing frozen at training time.
struct MlpModel {
    std::array<std::array<double, kNumInputs>, kNumHidden> w_hidden{};
    std::array<double, kNumHidden> b_hidden{};
    std::array<double, kNumHidden> w_out{};
    double b_out = 0.0;

    NormParams norm{0.0, 1.0, ""};
    Stationarization mode = Stationarization::daily_extraterrestrial;
    Cadence cadence = Cadence::daily;
    std::string train_station;
    std::uint64_t seed = 0;
};

/// Same shapes as the weights; also serves as the momentum buffer.
struct MlpGradient {
    std::array<std::array<double, kNumInputs>, kNumHidden> w_hidden{};
    std::array<double, kNumHidden> b_hidden{};
    std::array<double, kNumHidden> w_out{};
    double b_out = 0.0;
};

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    int max_epochs = 2000;
    int patience = 50;          // epochs without validation improvement
    double split_fraction = 0.8;  // chronological train share
    std::uint64_t seed = 0;
};

struct TrainReport {
    int epochs_run = 0;
    double final_train_mse = 0.0;  // at the returned (best-validation) snapshot
    double final_val_mse = 0.0;
    std::vector<std::pair<double, double>> mse_history;  // (train, val) per epoch
};

/// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawn from a seeded
/// SplitMix64; the same seed gives a bit-identical model.
inline MlpModel init_model(std::uint64_t seed) {
    MlpModel m;
    m.seed = seed;
    SplitMix64 rng(seed);
    const double r_hidden = 1.0 / std::sqrt(static_cast<double>(kNumInputs));
    for (auto& row : m.w_hidden)
        for (double& w : row) w = rng.next_uniform(-r_hidden, r_hidden);
    for (double& b : m.b_hidden) b = rng.next_uniform(-r_hidden, r_hidden);
    const double r_out = 1.0 / std::sqrt(static_cast<double>(kNumHidden));
    for (double& w : m.w_out) w = rng.next_uniform(-r_out, r_out);
    m.b_out = rng.next_uniform(-r_out, r_out);
    return m;
}

namespace detail {

inline double forward_unchecked(const MlpModel& m,
                                std::span<const double, kNumInputs> x) {
    double y = m.b_out;
    for (std::size_t j = 0; j < kNumHidden; ++j) {
        double z = m.b_hidden[j];
        for (std::size_t i = 0; i < kNumInputs; ++i)
            z += m.w_hidden[j][i] * x[i];
        y += m.w_out[j] * std::tanh(z);
    }
    return y;
}

}  // namespace detail

/// y = w_out . tanh(W x + b) + b_out.
inline double forward(const MlpModel& m,
                      std::span<const double, kNumInputs> x) {
    for (double v : x)
        if (!std::isfinite(v)) throw InputError("non-finite network input");
    return detail::forward_unchecked(m, x);
}

/// Analytic gradient of the mean squared error over the batch.
inline MlpGradient loss_gradient(const MlpModel& m,
                                 std::span<const TrainingSample> batch) {
    if (batch.empty()) throw InputError("empty batch");
    MlpGradient g;
    const double scale = 2.0 / static_cast<double>(batch.size());
    for (const TrainingSample& sample : batch) {
        std::array<double, kNumHidden> activation;
        double y = m.b_out;
        for (std::size_t j = 0; j < kNumHidden; ++j) {
            double z = m.b_hidden[j];
            for (std::size_t i = 0; i < kNumInputs; ++i)
                z += m.w_hidden[j][i] * sample.inputs[i];
            activation[j] = std::tanh(z);
            y += m.w_out[j] * activation[j];
        }
        const double dy = scale * (y - sample.target);
        g.b_out += dy;
        for (std::size_t j = 0; j < kNumHidden; ++j) {
            g.w_out[j] += dy * activation[j];
            const double dz =
                dy * m.w_out[j] * (1.0 - activation[j] * activation[j]);
            g.b_hidden[j] += dz;
            for (std::size_t i = 0; i < kNumInputs; ++i)
                g.w_hidden[j][i] += dz * sample.inputs[i];
        }
    }
    return g;
}

inline double mean_squared_error(const MlpModel& m,
                                 std::span<const TrainingSample> samples) {
    if (samples.empty()) throw InputError("empty sample set");
    double acc = 0.0;
    for (const TrainingSample& s : samples) {
        const double e = detail::forward_unchecked(m, s.inputs) - s.target;
        acc += e * e;
    }
    return acc / static_cast<double>(samples.size());
}

/// Full-batch gradient descent with momentum on a chronological split.
/// Stops early when the held-out tail stops improving and returns the
/// snapshot with the best validation MSE. Fully deterministic given the seed.
inline std::pair<MlpModel, TrainReport> train(
    std::span<const TrainingSample> data, const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0.0) throw InputError("learning_rate must be > 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw InputError("momentum must be in [0, 1)");
    if (cfg.max_epochs < 1 || cfg.patience < 1)
        throw InputError("max_epochs and patience must be >= 1");
    if (cfg.split_fraction <= 0.0 || cfg.split_fraction >= 1.0)
        throw InputError("split_fraction must be in (0, 1)");
    if (data.size() < 50)
        throw TrainingError("need at least 50 samples, got " +
                            std::to_string(data.size()));

    const std::size_t n_train = static_cast<std::size_t>(
        static_cast<double>(data.size()) * cfg.split_fraction);
    if (n_train == 0 || n_train == data.size())
        throw TrainingError("split leaves an empty partition");
    const auto train_set = data.first(n_train);
    const auto val_set = data.subspan(n_train);

    MlpModel model = init_model(cfg.seed);
    MlpGradient velocity;
    MlpModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    double best_train = 0.0;
    int best_epoch = 0;

    TrainReport report;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const MlpGradient g = loss_gradient(model, train_set);
        for (std::size_t j = 0; j < kNumHidden; ++j) {
            for (std::size_t i = 0; i < kNumInputs; ++i) {
                velocity.w_hidden[j][i] = cfg.momentum * velocity.w_hidden[j][i] -
                                          cfg.learning_rate * g.w_hidden[j][i];
                model.w_hidden[j][i] += velocity.w_hidden[j][i];
            }
            velocity.b_hidden[j] = cfg.momentum * velocity.b_hidden[j] -
                                   cfg.learning_rate * g.b_hidden[j];
            model.b_hidden[j] += velocity.b_hidden[j];
            velocity.w_out[j] = cfg.momentum * velocity.w_out[j] -
                                cfg.learning_rate * g.w_out[j];
            model.w_out[j] += velocity.w_out[j];
        }
        velocity.b_out = cfg.momentum * velocity.b_out - cfg.learning_rate * g.b_out;
        model.b_out += velocity.b_out;

        const double train_mse = mean_squared_error(model, train_set);
        const double val_mse = mean_squared_error(model, val_set);
        if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
            throw TrainingError("training diverged at epoch " +
                                std::to_string(epoch));
        report.mse_history.emplace_back(train_mse, val_mse);
        report.epochs_run = epoch;
        if (val_mse < best_val) {
            best_val = val_mse;
            best_train = train_mse;
            best_epoch = epoch;
            best = model;
        }
        if (epoch - best_epoch >= cfg.patience) break;
    }
    best.seed = cfg.seed;
    report.final_train_mse = best_train;
    report.final_val_mse = best_val;
    return {std::move(best), std::move(report)};
}

// ---------------------------------------------------------------------------
// Model file: versioned line-oriented text, 17-significant-digit weights, an
// FNV-1a64 checksum over everything above the checksum line. Field order is
// fixed; see the README for the full schema.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_weight(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string model_payload(const MlpModel& m) {
    std::ostringstream out;
    out << "solarcast_model 1\n";
    out << "architecture 8 3 1\n";
    out << "hidden_activation tanh\n";
    out << "output_activation linear\n";
    out << "cadence " << cadence_name(m.cadence) << '\n';
    out << "stationarization " << stationarization_name(m.mode) << '\n';
    out << "train_station " << m.train_station << '\n';
    out << "seed " << m.seed << '\n';
    out << "norm_source " << m.norm.source_station << '\n';
    out << "norm_k_min " << format_weight(m.norm.k_min) << '\n';
    out << "norm_k_max " << format_weight(m.norm.k_max) << '\n';
    out << "w_hidden";
    for (const auto& row : m.w_hidden)
        for (double w : row) out << ' ' << format_weight(w);
    out << '\n';
    out << "b_hidden";
    for (double b : m.b_hidden) out << ' ' << format_weight(b);
    out << '\n';
    out << "w_out";
    for (double w : m.w_out) out << ' ' << format_weight(w);
    out << '\n';
    out << "b_out " << format_weight(m.b_out) << '\n';
    return out.str();
}

inline std::string checksum_hex(const std::string& payload) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    return buf;
}

}  // namespace detail

inline void save_model(const MlpModel& m, const std::filesystem::path& path) {
    const std::string payload = detail::model_payload(m);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path.string());
    out << payload << "checksum " << detail::checksum_hex(payload) << '\n';
    if (!out) throw IoError("failed writing model file: " + path.string());
}

inline MlpModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    const auto checksum_pos = content.rfind("checksum ");
    if (checksum_pos == std::string::npos || checksum_pos == 0)
        throw ModelFormatError("model file truncated: no checksum line");
    const std::string payload = content.substr(0, checksum_pos);
    std::istringstream checksum_line(content.substr(checksum_pos));
    std::string tag, stored;
    checksum_line >> tag >> stored;
    if (stored != detail::checksum_hex(payload))
        throw ModelFormatError("model file checksum mismatch");

    std::istringstream ps(payload);
    std::string key;
    MlpModel m;

    auto expect_key = [&](const char* want) {
        if (!(ps >> key) || key != want)
            throw ModelFormatError(std::string("model file corrupt: expected '") +
                                   want + "'");
    };
    auto read_double = [&](const char* what) {
        double v;
        if (!(ps >> v))
            throw ModelFormatError(std::string("model file corrupt: bad ") + what);
        return v;
    };
    auto read_rest_of_line = [&]() {
        std::string rest;
        std::getline(ps, rest);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        return rest;
    };

    expect_key("solarcast_model");
    int version;
    if (!(ps >> version)) throw ModelFormatError("model file corrupt: version");
    if (version != 1)
        throw ModelFormatError("unsupported model format version " +
                               std::to_string(version));
    expect_key("architecture");
    int inputs, hidden, outputs;
    if (!(ps >> inputs >> hidden >> outputs) || inputs != 8 || hidden != 3 ||
        outputs != 1)
        throw ModelFormatError("unsupported architecture (want 8 3 1)");
    expect_key("hidden_activation");
    std::string activation;
    ps >> activation;
    if (activation != "tanh")
        throw ModelFormatError("unsupported hidden activation");
    expect_key("output_activation");
    ps >> activation;
    if (activation != "linear")
        throw ModelFormatError("unsupported output activation");
    expect_key("cadence");
    std::string word;
    ps >> word;
    m.cadence = parse_cadence(word);
    expect_key("stationarization");
    ps >> word;
    m.mode = parse_stationarization(word);
    expect_key("train_station");
    m.train_station = read_rest_of_line();
    expect_key("seed");
    if (!(ps >> m.seed)) throw ModelFormatError("model file corrupt: seed");
    expect_key("norm_source");
    m.norm.source_station = read_rest_of_line();
    expect_key("norm_k_min");
    m.norm.k_min = read_double("norm_k_min");
    expect_key("norm_k_max");
    m.norm.k_max = read_double("norm_k_max");
    expect_key("w_hidden");
    for (auto& row : m.w_hidden)
        for (double& w : row) w = read_double("w_hidden");
    expect_key("b_hidden");
    for (double& b : m.b_hidden) b = read_double("b_hidden");
    expect_key("w_out");
    for (double& w : m.w_out) w = read_double("w_out");
    expect_key("b_out");
    m.b_out = read_double("b_out");
    for (const auto& row : m.w_hidden)
        for (double w : row)
            if (!std::isfinite(w)) throw ModelFormatError("non-finite weight");
    return m;
}

}  // namespace solarcast
