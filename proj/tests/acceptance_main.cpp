// Acceptance suite: one pass/fail line per criterion, tolerances pinned in
// code. Takes the CLI binary path as argv[1] (needed by the end-to-end
// determinism criterion). Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "solarcast/forecast.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/mlp.hpp"
#include "solarcast/preprocessing.hpp"
#include "solarcast/pv.hpp"
#include "solarcast/series.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/synthesis.hpp"

using namespace solarcast;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

StationMeta remote_station() {
    return StationMeta("Remote", 41.92, 8.8, 0.0, 0.0);
}
StationMeta local_station() {
    return StationMeta("Local", 42.55, 9.48, 0.0, 0.0);
}

double sample_autocorr(const std::vector<double>& x, std::size_t lag) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double c0 = 0.0, cl = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        c0 += (x[i] - mean) * (x[i] - mean);
        if (i + lag < x.size()) cl += (x[i] - mean) * (x[i + lag] - mean);
    }
    return cl / c0;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------- criterion 1

void criterion_solar_geometry(std::string& note) {
    const double tol_decl = 0.2 * std::numbers::pi / 180.0;
    require(std::abs(declination(172) - deg_to_rad(23.45)) < tol_decl,
            "declination(172) off " + fmt(rad_to_deg(declination(172))));
    require(std::abs(declination(355) + deg_to_rad(23.45)) < tol_decl,
            "declination(355) off " + fmt(rad_to_deg(declination(355))));

    const StationMeta equator("Equator", 0.0, 0.0, 0.0, 0.0);
    const double closed_form =
        (24.0 / std::numbers::pi) * 1367.0 *
        (1.0 + 0.033 * std::cos(2.0 * std::numbers::pi * 81.0 / 365.0));
    const double h0 = extraterrestrial_daily(equator, 81);
    require(std::abs(h0 - closed_form) < 0.01 * closed_form,
            "equator equinox H0 " + fmt(h0) + " vs " + fmt(closed_form));

    const StationMeta arctic("Arctic", 80.0, 0.0, 0.0, 0.0);
    require(extraterrestrial_daily(arctic, 355) == 0.0, "polar night H0 != 0");

    double worst = 0.0;
    for (double lat : {0.0, 30.0, -30.0, 42.0, 60.0, -60.0}) {
        const StationMeta st("S", lat, 0.0, 0.0, 0.0);
        for (int n : {1, 81, 172, 264, 355}) {
            const CivilDateTime day = add_days(CivilDateTime{2001, 1, 1}, n - 1);
            double sum = 0.0;
            for (int h = 0; h < 24; ++h) {
                CivilDateTime t = day;
                t.hour = h;
                sum += extraterrestrial_hourly(st, t);
            }
            const double daily = extraterrestrial_daily(st, day_of_year(day));
            if (daily > 0.0) worst = std::max(worst, std::abs(sum - daily) / daily);
        }
    }
    require(worst < 0.02, "hourly-sum deviation " + fmt(100.0 * worst) + "%");
    note = "worst hourly-sum vs daily " + fmt(100.0 * worst) + "%";
}

// ---------------------------------------------------------------- criterion 2

void criterion_gradient(std::string& note) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        MlpModel m = init_model(seed);
        SplitMix64 rng(seed * 31);
        std::vector<TrainingSample> batch(24);
        for (TrainingSample& s : batch) {
            for (double& v : s.inputs) v = rng.next_uniform(-1.0, 1.0);
            s.target = rng.next_uniform(-1.0, 1.0);
        }
        const MlpGradient g = loss_gradient(m, batch);
        std::vector<double> analytic;
        for (const auto& row : g.w_hidden)
            for (double w : row) analytic.push_back(w);
        for (double b : g.b_hidden) analytic.push_back(b);
        for (double w : g.w_out) analytic.push_back(w);
        analytic.push_back(g.b_out);

        std::vector<double*> weights;
        for (auto& row : m.w_hidden)
            for (double& w : row) weights.push_back(&w);
        for (double& b : m.b_hidden) weights.push_back(&b);
        for (double& w : m.w_out) weights.push_back(&w);
        weights.push_back(&m.b_out);

        const double h = 1e-6;
        for (std::size_t w = 0; w < weights.size(); ++w) {
            const double saved = *weights[w];
            *weights[w] = saved + h;
            const double up = mean_squared_error(m, batch);
            *weights[w] = saved - h;
            const double down = mean_squared_error(m, batch);
            *weights[w] = saved;
            const double fd = (up - down) / (2.0 * h);
            worst = std::max(worst,
                             std::abs(fd - analytic[w]) /
                                 std::max({std::abs(fd), std::abs(analytic[w]),
                                           1e-10}));
        }
    }
    require(worst < 1e-6, "max gradient relative error " + fmt(worst));
    note = "max relative error " + fmt(worst);
}

// ---------------------------------------------------------------- criterion 3

void criterion_metrics(std::string& note) {
    const std::vector<Observation> mixed{{0, 3}, {0, 4}};
    require(std::abs(rmse(mixed) - std::sqrt(12.5)) <
                1e-12 * std::sqrt(12.5),
            "rmse{(0,3),(0,4)}");
    const std::vector<Observation> offset{{100, 110}, {50, 60}, {75, 85}};
    require(std::abs(rmse(offset) - 10.0) < 1e-12 * 10.0, "rmse offset 10");
    const std::vector<Observation> ten(40, Observation{100.0, 110.0});
    require(std::abs(nrmse_percent(ten) - 10.0) < 1e-12 * 10.0, "nrmse 10%");
    const std::vector<Observation> cc_pairs{{1, 2}, {2, 1}, {3, 3}};
    require(std::abs(correlation(cc_pairs) - 0.5) < 1e-12 * 0.5, "cc 0.5");

    const std::vector<Observation> degenerate(50, Observation{100.0, 90.0});
    const ConfidenceInterval d = nrmse_ci95(degenerate, 17);
    require(d.lo == d.hi && std::abs(d.lo - 10.0) < 1e-12, "degenerate CI");

    SplitMix64 rng(3);
    std::vector<Observation> noisy(200);
    for (Observation& o : noisy) {
        o.measured = 1000.0 + rng.next_uniform(-100.0, 100.0);
        o.predicted = o.measured + rng.next_uniform(-50.0, 50.0);
    }
    const ConfidenceInterval a = nrmse_ci95(noisy, 123);
    const ConfidenceInterval b = nrmse_ci95(noisy, 123);
    require(a.lo == b.lo && a.hi == b.hi, "bootstrap not deterministic");
    note = "all fixtures exact to 1e-12";
}

// ---------------------------------------------------------------- criterion 4

void criterion_preprocessing(std::string& note) {
    SynthesisParams params;
    params.station_sigma = 0.05;
    for (Cadence cadence : {Cadence::daily, Cadence::hourly}) {
        const IrradiationSeries s = synthesize_station(
            8, remote_station(), cadence, {{2001, 2, 1}, {2001, 7, 31}}, params);
        const ClearnessSeries k = stationarize(s);
        const IrradiationSeries back = destationarize(k, remote_station());
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (k.points[i].quality != Quality::measured) continue;
            require(std::abs(back.points[i].value - s.points[i].value) <=
                        1e-12 * std::abs(s.points[i].value),
                    "destationarize round trip");
        }
    }

    const NormParams norm{0.113, 0.987, "X"};
    SplitMix64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double k = rng.next_uniform(-0.5, 2.0);
        require(std::abs(denormalize(normalize(k, norm), norm) - k) <=
                    1e-12 * std::max(std::abs(k), 1.0),
                "normalize round trip");
    }

    SynthesisParams noise_free;
    noise_free.mean_clearness = 0.7;
    noise_free.sigma = 0.0;
    const IrradiationSeries s = synthesize_station(
        3, remote_station(), Cadence::daily, {{2001, 1, 1}, {2001, 12, 31}},
        noise_free);
    for (const ClearnessPoint& p : stationarize(s).points)
        if (p.quality == Quality::measured)
            require(std::abs(p.k - 0.7) < 1e-12, "noise-free k != 0.7");
    note = "round trips exact to 1e-12";
}

// ---------------------------------------------------------------- criterion 5

void criterion_stationarization_effect(std::string& note) {
    SynthesisParams params;  // mean .7, rho .8, sigma .1
    const IrradiationSeries s = synthesize_station(
        13, remote_station(), Cadence::daily, {{1998, 1, 1}, {2007, 12, 31}},
        params);
    const ClearnessSeries k = stationarize(s);
    std::vector<double> raw, clearness;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        raw.push_back(s.points[i].value);
        clearness.push_back(k.points[i].k);
    }
    const double ac_raw = sample_autocorr(raw, 365);
    const double ac_k = sample_autocorr(clearness, 365);
    require(std::abs(ac_k) <= 0.5 * std::abs(ac_raw),
            "lag-365 autocorr raw " + fmt(ac_raw) + " vs k " + fmt(ac_k));
    note = "lag-365 autocorr " + fmt(ac_raw) + " -> " + fmt(ac_k);
}

// ---------------------------------------------------------------- criterion 6

struct AbcRmse {
    double a, b, c;
};

AbcRmse run_relocation_seed(std::uint64_t seed, Cadence cadence) {
    SynthesisParams remote_params;
    remote_params.mean_clearness = 0.60;
    remote_params.rho = 0.8;
    remote_params.sigma = 0.08;
    remote_params.station_sigma = 0.05;
    SynthesisParams local_params = remote_params;
    local_params.mean_clearness = 0.70;

    const DateRange train_span = cadence == Cadence::daily
                                     ? DateRange{{1998, 1, 1}, {2005, 12, 31}}
                                     : DateRange{{2003, 1, 1}, {2005, 12, 31}};
    const DateRange target_span = cadence == Cadence::daily
                                      ? DateRange{{2006, 1, 1}, {2008, 12, 31}}
                                      : DateRange{{2006, 1, 1}, {2006, 12, 31}};

    const IrradiationSeries train_remote = synthesize_station(
        seed, remote_station(), cadence, train_span, remote_params);
    const IrradiationSeries train_local = synthesize_station(
        seed, local_station(), cadence, train_span, local_params);
    const IrradiationSeries target = synthesize_station(
        seed, local_station(), cadence, target_span, local_params);

    AbcOptions opts;
    opts.train.max_epochs = cadence == Cadence::daily ? 800 : 600;
    opts.train.seed = seed;
    opts.bootstrap_resamples = 200;
    opts.metrics_seed = seed;
    const AbcResult r = run_abc_experiment(train_remote, train_local, target, opts);
    return {r.report_a.rmse_wh, r.report_b.rmse_wh, r.report_c.rmse_wh};
}

void criterion_relocation(std::string& note) {
    std::ostringstream detail;
    for (Cadence cadence : {Cadence::daily, Cadence::hourly}) {
        std::vector<double> rmse_a, rmse_b, rmse_c;
        int a_beats_c = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const AbcRmse r = run_relocation_seed(seed, cadence);
            rmse_a.push_back(r.a);
            rmse_b.push_back(r.b);
            rmse_c.push_back(r.c);
            if (r.a < r.c) ++a_beats_c;
        }
        const double med_a = median(rmse_a);
        const double med_b = median(rmse_b);
        const char* name = cadence == Cadence::daily ? "daily" : "hourly";
        detail << name << ": A<C " << a_beats_c << "/10, median A "
               << fmt(med_a) << ", B " << fmt(med_b) << ", C "
               << fmt(median(rmse_c)) << "; ";
        require(a_beats_c >= 8, std::string(name) + " cadence: ANN-remote beat "
                                    "persistence only " +
                                    std::to_string(a_beats_c) + "/10");
        require(med_b <= med_a,
                std::string(name) + " cadence: median RMSE(B) " + fmt(med_b) +
                    " > median RMSE(A) " + fmt(med_a));
        require(med_a <= 1.10 * med_b,
                std::string(name) + " cadence: median RMSE(A) " + fmt(med_a) +
                    " > 1.10 * median RMSE(B) " + fmt(med_b));
    }
    note = detail.str();
}

// ---------------------------------------------------------------- criterion 7

void criterion_training_sanity(std::string& note) {
    const MlpModel teacher = init_model(999);
    SplitMix64 rng(1234);
    std::vector<TrainingSample> data(500);
    for (TrainingSample& s : data) {
        for (double& v : s.inputs) v = rng.next_uniform(-1.0, 1.0);
        s.target = forward(teacher, s.inputs);
    }
    TrainConfig cfg;
    cfg.seed = 42;
    auto [m1, r1] = train(data, cfg);
    require(r1.epochs_run <= 2000, "epochs exceeded 2000");
    require(r1.final_val_mse < 1e-3,
            "validation MSE " + fmt(r1.final_val_mse));
    auto [m2, r2] = train(data, cfg);
    const fs::path p1 = fs::temp_directory_path() / "acc_model_1.model";
    const fs::path p2 = fs::temp_directory_path() / "acc_model_2.model";
    save_model(m1, p1);
    save_model(m2, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::ostringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    require(s1.str() == s2.str() && !s1.str().empty(),
            "model files not byte-identical");
    fs::remove(p1);
    fs::remove(p2);
    note = "val MSE " + fmt(r1.final_val_mse) + " after " +
           std::to_string(r1.epochs_run) + " epochs";
}

// ---------------------------------------------------------------- criterion 8

void criterion_pv_chain(std::string& note) {
    const StationMeta st = remote_station();
    const PvPlant flat(0.13, 10.125, 0.0, 0.0, st);
    for (int hour = 0; hour < 24; ++hour) {
        const CivilDateTime t{2001, 9, 10, hour, 30, 0};
        require(clear_sky_tilted(st, t, flat) == clear_sky_horizontal(st, t),
                "beta = 0 transposition differs from horizontal");
    }

    ForecastSeries fixture;
    fixture.cadence = Cadence::hourly;
    fixture.points.push_back({{2001, 12, 21, 12, 0, 0}, 1000.0, 1000.0});
    const PvPlant plant(0.13, 10.125, 80.0, 0.0, st);
    const std::vector<PvEnergyPoint> e = pv_energy(fixture, plant);
    require(e[0].e_pv_wh == 1316.25,
            "paper constants give " + fmt(e[0].e_pv_wh) + " Wh, want 1316.25");

    ForecastSeries multi;
    multi.cadence = Cadence::hourly;
    CivilDateTime t{2001, 6, 1, 6, 0, 0};
    SplitMix64 rng(9);
    for (int i = 0; i < 12; ++i) {
        const double v = rng.next_uniform(0.0, 900.0);
        multi.points.push_back({t, v, v});
        t = add_hours(t, 1);
    }
    const PvPlant half_area(0.13, 10.125 / 2.0, 80.0, 0.0, st);
    const PvPlant double_eff(0.26, 10.125, 80.0, 0.0, st);
    ForecastSeries scaled = multi;
    for (ForecastPoint& p : scaled.points) p.predicted *= 3.0;
    const auto base = pv_energy(multi, plant);
    const auto ha = pv_energy(multi, half_area);
    const auto de = pv_energy(multi, double_eff);
    const auto sc = pv_energy(scaled, plant);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double tol = 1e-12 * std::max(base[i].e_pv_wh, 1.0);
        require(std::abs(ha[i].e_pv_wh - base[i].e_pv_wh / 2.0) <= tol,
                "energy not linear in area");
        require(std::abs(de[i].e_pv_wh - base[i].e_pv_wh * 2.0) <= tol,
                "energy not linear in efficiency");
        require(std::abs(sc[i].e_pv_wh - base[i].e_pv_wh * 3.0) <= tol,
                "energy not linear in irradiation");
    }
    note = "beta=0 identity, linearity, 1316.25 Wh fixture";
}

// ---------------------------------------------------------------- criterion 9

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        g_cli_path + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_cli_determinism(std::string& note) {
    require(!g_cli_path.empty(), "CLI path not supplied (argv[1])");
    const fs::path root = fs::temp_directory_path() / "solarcast_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    const fs::path remote_cfg = root / "remote.cfg";
    std::ofstream(remote_cfg)
        << "name = Remote\nlatitude_deg = 41.92\nlongitude_deg = 8.8\n"
        << "altitude_m = 0\nutc_offset_h = 0\n";
    const fs::path local_cfg = root / "local.cfg";
    std::ofstream(local_cfg)
        << "name = Local\nlatitude_deg = 42.55\nlongitude_deg = 9.48\n"
        << "altitude_m = 0\nutc_offset_h = 0\n";
    const fs::path plant_cfg = root / "plant.cfg";
    std::ofstream(plant_cfg) << "efficiency = 0.13\narea_m2 = 10.125\n"
                             << "tilt_deg = 80\nazimuth_deg = 0\n";
    const fs::path run_cfg = root / "run.cfg";
    std::ofstream(run_cfg) << "max_epochs = 150\nbootstrap_resamples = 200\n"
                           << "synth_station_sigma = 0.05\n";

    auto pipeline = [&](const fs::path& dir) {
        fs::create_directories(dir);
        const std::string common =
            " --seed 7 --config " + run_cfg.string();
        const fs::path log = dir / "log.txt";
        require(run_cli("synthesize --station " + remote_cfg.string() +
                            " --cadence daily --from 2001-01-01 --to 2003-12-31" +
                            common + " --out " + (dir / "remote.csv").string(),
                        log) == 0,
                "synthesize remote failed");
        require(run_cli("synthesize --station " + local_cfg.string() +
                            " --cadence daily --from 2001-01-01 --to 2003-12-31" +
                            common + " --out " + (dir / "local.csv").string(),
                        log) == 0,
                "synthesize local failed");
        require(run_cli("synthesize --station " + local_cfg.string() +
                            " --cadence daily --from 2004-01-01 --to 2004-12-31" +
                            common + " --out " + (dir / "target.csv").string(),
                        log) == 0,
                "synthesize target failed");
        require(run_cli("train --csv " + (dir / "remote.csv").string() +
                            " --station " + remote_cfg.string() +
                            " --cadence daily" + common + " --out " +
                            (dir / "model_a.model").string(),
                        log) == 0,
                "train failed");
        require(run_cli("evaluate --model-a " + (dir / "model_a.model").string() +
                            " --target-csv " + (dir / "target.csv").string() +
                            " --target-station " + local_cfg.string() +
                            " --local-csv " + (dir / "local.csv").string() +
                            common + " --out-dir " + (dir / "eval").string(),
                        log) == 0,
                "evaluate failed");
        require(run_cli("synthesize --station " + remote_cfg.string() +
                            " --cadence hourly --from 2002-01-01 --to 2002-12-31" +
                            common + " --out " + (dir / "hourly.csv").string(),
                        log) == 0,
                "synthesize hourly failed");
        require(run_cli("train --csv " + (dir / "hourly.csv").string() +
                            " --station " + remote_cfg.string() +
                            " --cadence hourly" + common + " --out " +
                            (dir / "model_h.model").string(),
                        log) == 0,
                "train hourly failed");
        require(run_cli("synthesize --station " + remote_cfg.string() +
                            " --cadence hourly --from 2003-06-01 --to 2003-06-30" +
                            common + " --out " + (dir / "pv_target.csv").string(),
                        log) == 0,
                "synthesize pv target failed");
        require(run_cli("pv --model " + (dir / "model_h.model").string() +
                            " --csv " + (dir / "pv_target.csv").string() +
                            " --station " + remote_cfg.string() + " --plant " +
                            plant_cfg.string() + common + " --out " +
                            (dir / "pv.csv").string(),
                        log) == 0,
                "pv failed");
    };

    pipeline(root / "run1");
    pipeline(root / "run2");

    const std::vector<std::string> artifacts{
        "remote.csv",      "local.csv",          "target.csv",
        "model_a.model",   "eval/report.csv",    "eval/forecast_a.csv",
        "eval/forecast_b.csv", "eval/forecast_c.csv", "hourly.csv",
        "model_h.model",   "pv_target.csv",      "pv.csv"};
    for (const std::string& artifact : artifacts) {
        const std::string one = slurp(root / "run1" / artifact);
        const std::string two = slurp(root / "run2" / artifact);
        require(!one.empty(), artifact + " missing or empty");
        require(one == two, artifact + " differs between identical runs");
    }
    note = std::to_string(artifacts.size()) + " artifacts byte-identical";
}

// ----------------------------------------------------------------------------

struct Criterion {
    int id;
    const char* label;
    double time_limit_s;
    std::function<void(std::string&)> body;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    const std::vector<Criterion> criteria{
        {1, "solar-geometry oracles", 1.0, criterion_solar_geometry},
        {2, "backprop gradient vs finite differences", 5.0, criterion_gradient},
        {3, "metric oracles and bootstrap", 5.0, criterion_metrics},
        {4, "preprocessing round trips", 5.0, criterion_preprocessing},
        {5, "stationarization removes the annual cycle", 5.0,
         criterion_stationarization_effect},
        {6, "relocation ordering on twin stations", 180.0, criterion_relocation},
        {7, "realizable-function training sanity", 30.0,
         criterion_training_sanity},
        {8, "pv transposition and energy chain", 1.0, criterion_pv_chain},
        {9, "end-to-end CLI determinism", 180.0, criterion_cli_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string note;
        std::string failure;
        try {
            c.body(note);
        } catch (const CheckFailure& f) {
            failure = f.message;
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        if (failure.empty() && elapsed > c.time_limit_s)
            failure = "runtime " + fmt(elapsed) + " s exceeds " +
                      fmt(c.time_limit_s) + " s";
        if (failure.empty()) {
            std::printf("PASS  criterion %d: %s (%.2f s) %s\n", c.id, c.label,
                        elapsed, note.empty() ? "" : ("- " + note).c_str());
        } else {
            std::printf("FAIL  criterion %d: %s (%.2f s) - %s\n", c.id, c.label,
                        elapsed, failure.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
