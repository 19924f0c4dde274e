// solarcast: one-step-ahead global horizontal irradiation forecasting with a
// small MLP, relocation experiments against persistence, and conversion of
// hourly forecasts into tilted-plane PV energy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "solarcast/config.hpp"
#include "solarcast/forecast.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/pv.hpp"
#include "solarcast/series.hpp"
#include "solarcast/synthesis.hpp"

namespace {

using namespace solarcast;

constexpr int kExitSchema = 2;
constexpr int kExitIo = 3;
constexpr int kExitTraining = 4;

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const TrainingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTraining;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const ModelFormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;

    RunConfig load() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);
        if (seed_flag) cfg.seed = *seed_flag;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonArgs& common) {
    cmd->add_option("--config", common.config_path,
                    "key = value config file (flags win)");
    cmd->add_option("--seed", common.seed_flag, "global seed override");
}

void print_train_report(const TrainReport& report, std::uint64_t seed) {
    std::printf("epochs_run        %d\n", report.epochs_run);
    std::printf("final_train_mse   %.9g\n", report.final_train_mse);
    std::printf("final_val_mse     %.9g\n", report.final_val_mse);
    std::printf("seed              %llu\n",
                static_cast<unsigned long long>(seed));
}

CivilDateTime parse_date_flag(const std::string& text, const char* what) {
    try {
        const CivilDateTime t = parse_datetime(text);
        if (t.hour != 0 || t.minute != 0 || t.second != 0)
            throw InputError("expected a bare date");
        return t;
    } catch (const InputError& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

void write_reports_csv(const std::filesystem::path& path,
                       std::span<const EvaluationReport> reports) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report file: " + path.string());
    out << report_csv_header() << '\n';
    for (const EvaluationReport& r : reports) out << report_csv_row(r) << '\n';
}

// --------------------------------------------------------------------------

void cmd_ingest(const CommonArgs& common, const std::string& csv,
                const std::string& station_file, const std::string& cadence_text,
                const std::string& out_path) {
    const RunConfig cfg = common.load();
    const StationMeta station = load_station_file(station_file);
    const Cadence cadence = parse_cadence(cadence_text);
    auto [series, report] =
        load_csv(std::filesystem::path(csv), station, cadence,
                 cfg.solar_constant_w_m2);
    write_csv(series, std::filesystem::path(out_path));
    std::printf("rows_read         %zu\n", report.rows_read);
    std::printf("rows_accepted     %zu\n", report.rows_accepted);
    std::printf("gaps_inserted     %zu\n", report.gaps_inserted);
    std::printf("qc_violations     %zu\n", report.qc_violations);
    std::printf("points_total      %zu\n", series.points.size());
    std::printf("wrote %s\n", out_path.c_str());
}

void cmd_synthesize(const CommonArgs& common, const std::string& station_file,
                    const std::string& cadence_text, const std::string& from,
                    const std::string& to, const std::string& out_path) {
    const RunConfig cfg = common.load();
    const StationMeta station = load_station_file(station_file);
    const Cadence cadence = parse_cadence(cadence_text);
    const DateRange span{parse_date_flag(from, "--from"),
                         parse_date_flag(to, "--to")};
    const IrradiationSeries series =
        synthesize_station(cfg.seed, station, cadence, span,
                           cfg.synthesis_params(), cfg.solar_constant_w_m2);
    write_csv(series, std::filesystem::path(out_path));
    std::printf("synthesized %zu %s points for %s (seed %llu)\n",
                series.points.size(), std::string(cadence_name(cadence)).c_str(),
                station.name.c_str(),
                static_cast<unsigned long long>(cfg.seed));
}

void cmd_train(const CommonArgs& common, const std::string& csv,
               const std::string& station_file, const std::string& cadence_text,
               const std::string& out_path) {
    const RunConfig cfg = common.load();
    const StationMeta station = load_station_file(station_file);
    const Cadence cadence = parse_cadence(cadence_text);
    auto [series, ingest] = load_csv(std::filesystem::path(csv), station,
                                     cadence, cfg.solar_constant_w_m2);
    (void)ingest;
    const TrainedForecaster trained =
        train_forecaster(series, cfg.train_config(), cfg.forecast_options());
    save_model(trained.model, std::filesystem::path(out_path));
    print_train_report(trained.report, cfg.seed);
    std::printf("wrote %s\n", out_path.c_str());
}

void cmd_forecast(const CommonArgs& common, const std::string& model_path,
                  const std::string& csv, const std::string& station_file,
                  const std::string& out_path) {
    const RunConfig cfg = common.load();
    const MlpModel model = load_model(model_path);
    const StationMeta station = load_station_file(station_file);
    auto [series, ingest] = load_csv(std::filesystem::path(csv), station,
                                     model.cadence, cfg.solar_constant_w_m2);
    (void)ingest;
    const ForecastSeries forecast =
        ann_forecast(model, series, cfg.forecast_options());
    write_forecast_csv(forecast, std::filesystem::path(out_path));
    std::printf("wrote %zu %s predictions to %s\n", forecast.points.size(),
                std::string(forecaster_name(forecast.kind)).c_str(),
                out_path.c_str());
}

void cmd_evaluate(const CommonArgs& common, const std::string& model_a_path,
                  const std::string& target_csv,
                  const std::string& target_station_file,
                  const std::string& local_csv,
                  const std::string& local_station_file,
                  const std::string& out_dir) {
    const RunConfig cfg = common.load();
    const MlpModel model_a = load_model(model_a_path);
    const StationMeta target_station = load_station_file(target_station_file);
    auto [target, target_ingest] =
        load_csv(std::filesystem::path(target_csv), target_station,
                 model_a.cadence, cfg.solar_constant_w_m2);
    (void)target_ingest;

    const ForecastOptions fopts = cfg.forecast_options();
    const NrmseDivisor divisor = parse_nrmse_divisor(cfg.nrmse_divisor);

    ForecastSeries fa = ann_forecast(model_a, target, fopts);
    fa.kind = ForecasterKind::ann_remote;
    ForecastSeries fc = persistence_forecast(target, fopts);

    std::optional<ForecastSeries> fb;
    bool local_overlaps_target = false;
    if (!local_csv.empty()) {
        const StationMeta local_station =
            local_station_file.empty()
                ? target_station
                : load_station_file(local_station_file);
        auto [local_series, local_ingest] =
            load_csv(std::filesystem::path(local_csv), local_station,
                     model_a.cadence, cfg.solar_constant_w_m2);
        (void)local_ingest;
        local_overlaps_target =
            detail::spans_overlap(local_series, target);
        const TrainedForecaster b =
            train_forecaster(local_series, cfg.train_config(), fopts);
        fb = ann_forecast(b.model, target, fopts);
        fb->kind = ForecasterKind::ann_local;
    }

    std::vector<ForecastSeries*> all{&fa};
    if (fb) all.push_back(&*fb);
    all.push_back(&fc);
    detail::restrict_to_common_times(all);

    if (model_a.train_station == target_station.name || local_overlaps_target)
        std::printf("WARNING: target series overlaps training data; this "
                    "evaluation is IN-SAMPLE and optimistic.\n");

    std::vector<EvaluationReport> reports;
    reports.push_back(evaluate_pairs(
        to_observations(fa), std::string(forecaster_name(fa.kind)),
        target_station.name, cfg.seed, divisor, cfg.bootstrap_resamples));
    if (fb)
        reports.push_back(evaluate_pairs(
            to_observations(*fb), std::string(forecaster_name(fb->kind)),
            target_station.name, cfg.seed, divisor, cfg.bootstrap_resamples));
    reports.push_back(evaluate_pairs(
        to_observations(fc), std::string(forecaster_name(fc.kind)),
        target_station.name, cfg.seed, divisor, cfg.bootstrap_resamples));

    std::fputs(render_report_table(reports).c_str(), stdout);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_reports_csv(dir / "report.csv", reports);
    write_forecast_csv(fa, dir / "forecast_a.csv");
    if (fb) write_forecast_csv(*fb, dir / "forecast_b.csv");
    write_forecast_csv(fc, dir / "forecast_c.csv");
    std::printf("wrote %s\n", (dir / "report.csv").string().c_str());
}

std::vector<std::pair<CivilDateTime, double>> load_measured_pv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open measured PV file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty measured PV file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,e_pv_wh")
        throw ParseError(1, "header must be 'timestamp,e_pv_wh'");
    std::vector<std::pair<CivilDateTime, double>> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(lineno, "expected two fields");
        CivilDateTime t;
        try {
            t = parse_datetime(std::string_view(line).substr(0, comma));
        } catch (const InputError& e) {
            throw ParseError(lineno, e.what());
        }
        out.emplace_back(
            t, detail::parse_double(std::string_view(line).substr(comma + 1),
                                    "e_pv_wh"));
    }
    return out;
}

void cmd_pv(const CommonArgs& common, const std::string& model_path,
            const std::string& csv, const std::string& station_file,
            const std::string& plant_file, const std::string& out_path,
            const std::string& measured_pv_path) {
    const RunConfig cfg = common.load();
    const MlpModel model = load_model(model_path);
    if (model.cadence != Cadence::hourly)
        throw SchemaError("the PV chain needs an hourly model");
    const StationMeta station = load_station_file(station_file);
    const PvPlant plant =
        load_plant_file(std::filesystem::path(plant_file), station);
    auto [series, ingest] = load_csv(std::filesystem::path(csv), station,
                                     Cadence::hourly, cfg.solar_constant_w_m2);
    (void)ingest;

    const ForecastSeries horizontal =
        ann_forecast(model, series, cfg.forecast_options());
    const ForecastSeries tilted = transpose_forecast(
        horizontal, plant, cfg.ratio_cap, cfg.clear_sky_options());
    const std::vector<PvEnergyPoint> energy = pv_energy(tilted, plant);

    std::vector<std::pair<CivilDateTime, double>> measured;
    if (!measured_pv_path.empty())
        measured = load_measured_pv(measured_pv_path);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write PV file: " + out_path);
    out << "timestamp,i_beta_wh_m2,e_pv_wh";
    if (!measured.empty()) out << ",measured_e_pv_wh";
    out << '\n';
    double total_wh = 0.0;
    std::vector<Observation> joined;
    std::size_t m = 0;
    for (const PvEnergyPoint& p : energy) {
        out << format_datetime(p.time) << ','
            << detail::format_value(p.i_beta_wh_m2) << ','
            << detail::format_value(p.e_pv_wh);
        if (!measured.empty()) {
            while (m < measured.size() && measured[m].first < p.time) ++m;
            if (m < measured.size() && measured[m].first == p.time) {
                out << ',' << detail::format_value(measured[m].second);
                joined.push_back({measured[m].second, p.e_pv_wh});
            } else {
                out << ",NA";
            }
        }
        out << '\n';
        total_wh += p.e_pv_wh;
    }
    std::printf("hours             %zu\n", energy.size());
    std::printf("total_e_pv_wh     %.1f\n", total_wh);
    if (!joined.empty()) {
        std::printf("compared_hours    %zu\n", joined.size());
        std::printf("rmse_wh           %.1f\n", rmse(joined));
        std::printf("nrmse_pct         %.1f\n",
                    nrmse_percent(joined, parse_nrmse_divisor(cfg.nrmse_divisor)));
    }
    std::printf("wrote %s\n", out_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "solar irradiation forecasting with a relocatable 8-3-1 MLP, "
        "persistence baselines, and PV plane-of-array energy"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string csv, station_file, cadence_text, out_path, model_path;
    std::string from, to, plant_file, measured_pv;
    std::string target_csv, target_station_file, local_csv, local_station_file;
    std::string out_dir;

    CLI::App* ingest = app.add_subcommand(
        "ingest", "validate a raw CSV and write the canonical series file");
    add_common(ingest, common);
    ingest->add_option("--csv", csv, "raw series CSV")->required();
    ingest->add_option("--station", station_file, "station config")->required();
    ingest->add_option("--cadence", cadence_text, "hourly|daily")->required();
    ingest->add_option("--out", out_path, "canonical series file")->required();

    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "generate a deterministic synthetic series");
    add_common(synthesize, common);
    synthesize->add_option("--station", station_file, "station config")->required();
    synthesize->add_option("--cadence", cadence_text, "hourly|daily")->required();
    synthesize->add_option("--from", from, "first day, YYYY-MM-DD")->required();
    synthesize->add_option("--to", to, "last day, YYYY-MM-DD")->required();
    synthesize->add_option("--out", out_path, "output CSV")->required();

    CLI::App* train_cmd = app.add_subcommand(
        "train", "train the 8-3-1 MLP on an ingested series");
    add_common(train_cmd, common);
    train_cmd->add_option("--csv", csv, "training series CSV")->required();
    train_cmd->add_option("--station", station_file, "station config")->required();
    train_cmd->add_option("--cadence", cadence_text, "hourly|daily")->required();
    train_cmd->add_option("--out", out_path, "model file")->required();

    CLI::App* forecast_cmd = app.add_subcommand(
        "forecast", "run a trained model over a target series");
    add_common(forecast_cmd, common);
    forecast_cmd->add_option("--model", model_path, "model file")->required();
    forecast_cmd->add_option("--csv", csv, "target series CSV")->required();
    forecast_cmd->add_option("--station", station_file, "target station config")
        ->required();
    forecast_cmd->add_option("--out", out_path, "forecast CSV")->required();

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "A/B/C comparison of relocated MLP, local MLP, persistence");
    add_common(evaluate, common);
    evaluate->add_option("--model-a", model_path, "trained remote model")
        ->required();
    evaluate->add_option("--target-csv", target_csv, "target year series")
        ->required();
    evaluate->add_option("--target-station", target_station_file,
                         "target station config")
        ->required();
    evaluate->add_option("--local-csv", local_csv,
                         "local training series (enables case B)");
    evaluate->add_option("--local-station", local_station_file,
                         "local station config (defaults to target station)");
    evaluate->add_option("--out-dir", out_dir, "report directory")->required();

    CLI::App* pv = app.add_subcommand(
        "pv", "tilted-plane irradiation and PV energy from an hourly model");
    add_common(pv, common);
    pv->add_option("--model", model_path, "hourly model file")->required();
    pv->add_option("--csv", csv, "hourly target series CSV")->required();
    pv->add_option("--station", station_file, "station config")->required();
    pv->add_option("--plant", plant_file, "plant config")->required();
    pv->add_option("--out", out_path, "PV output CSV")->required();
    pv->add_option("--measured-pv", measured_pv,
                   "measured plant energy CSV for comparison");

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed())
        return run_guarded([&] {
            cmd_ingest(common, csv, station_file, cadence_text, out_path);
        });
    if (synthesize->parsed())
        return run_guarded([&] {
            cmd_synthesize(common, station_file, cadence_text, from, to, out_path);
        });
    if (train_cmd->parsed())
        return run_guarded([&] {
            cmd_train(common, csv, station_file, cadence_text, out_path);
        });
    if (forecast_cmd->parsed())
        return run_guarded([&] {
            cmd_forecast(common, model_path, csv, station_file, out_path);
        });
    if (evaluate->parsed())
        return run_guarded([&] {
            cmd_evaluate(common, model_path, target_csv, target_station_file,
                         local_csv, local_station_file, out_dir);
        });
    if (pv->parsed())
        return run_guarded([&] {
            cmd_pv(common, model_path, csv, station_file, plant_file, out_path,
                   measured_pv);
        });
    return 0;
}
