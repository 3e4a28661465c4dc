#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "compvar/engine.hpp"
#include "compvar/errors.hpp"
#include "compvar/io.hpp"
#include "compvar/simulation.hpp"
#include "compvar/version.hpp"

namespace compvar {

// Exit codes: 0 success, 2 usage, 3 data or domain error, 4 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

namespace detail {

inline int usage_error(const std::string& msg) {
    std::cerr << "usage error: " << msg << '\n';
    return kExitUsage;
}

inline bool parse_dist(const std::string& s, DistKind& kind, double& dof) {
    if (s == "normal") {
        kind = DistKind::normal;
        return true;
    }
    if (s == "empirical") {
        kind = DistKind::empirical;
        return true;
    }
    if (s == "t") {
        kind = DistKind::student_t;  // keeps the default dof
        return true;
    }
    if (s.rfind("t:", 0) == 0) {
        const std::string tail = s.substr(2);
        double parsed = 0.0;
        const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), parsed);
        if (res.ec != std::errc{} || res.ptr != tail.data() + tail.size()) {
            return false;
        }
        kind = DistKind::student_t;
        dof = parsed;
        return true;
    }
    return false;
}

struct BacktestArgs {
    std::string input;
    std::string out_dir;
    std::string dist = "normal";
    double alpha = 0.0;
    std::vector<double> kappas;
    std::size_t window = 0;
};

struct SimulateArgs {
    std::string out_dir;
    std::string dist = "normal";
    double alpha = 0.0;
    std::vector<double> kappas;
    std::size_t n = 0;
    std::size_t window = 0;
    double mean = 0.0;
    double variance = 0.01;
    std::optional<std::uint64_t> seed;
    std::size_t ensemble = 0;  // 0 = no ensemble run
};

inline int cmd_backtest(const BacktestArgs& a, DistKind kind, double dof) {
    const ReturnSeries series = ingest_prices(a.input);

    BacktestConfig cfg;
    cfg.alpha = a.alpha;
    cfg.window_W = a.window;
    cfg.dist_kind = kind;
    cfg.student_dof = dof;

    const std::filesystem::path out_dir(a.out_dir);
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json report;
    report["tool"] = "compvar";
    report["tool_version"] = kVersion;
    report["generated_at_utc"] = utc_timestamp_now();
    report["command"] = "backtest";
    report["input"] = a.input;
    report["alpha"] = a.alpha;
    report["window"] = a.window;
    report["dist"] = a.dist;
    report["n_returns"] = series.size();
    report["results"] = nlohmann::ordered_json::array();

    std::vector<std::string> artifacts = {"report.json"};
    const std::vector<BacktestReport> reports = sweep_kappa(series, cfg, a.kappas);
    // Safe only after the sweep has validated the series length.
    const std::vector<std::string> step_dates(series.dates.begin() +
                                                  static_cast<std::ptrdiff_t>(a.window),
                                              series.dates.end());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const std::string& w : reports[i].warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        report["results"].push_back(report_entry_json(a.kappas[i], reports[i]));
        const std::string name = "trajectory_" + fmt_double(a.kappas[i]) + ".csv";
        write_trajectory_csv(out_dir / name, reports[i], step_dates);
        artifacts.push_back(name);
    }
    write_json(out_dir / "report.json", report);

    RunManifest man;
    man.command = "backtest";
    man.config = {{"input", a.input}, {"alpha", a.alpha},   {"kappa", a.kappas},
                  {"window", a.window}, {"dist", a.dist},   {"out", a.out_dir}};
    man.input_path = a.input;
    man.input_sha256 = sha256_file(a.input);
    man.artifacts = std::move(artifacts);
    write_json(out_dir / "manifest.json", manifest_json(man));
    return kExitOk;
}

inline int cmd_simulate(const SimulateArgs& a, DistKind kind, double dof,
                        std::uint64_t seed) {
    SimConfig sim;
    sim.n_total = a.n;
    sim.window_W = a.window;
    sim.alpha = a.alpha;
    sim.kappas = a.kappas;
    sim.mean = a.mean;
    sim.variance = a.variance;
    sim.seed = seed;
    sim.dist_kind = kind;
    sim.student_dof = dof;

    const ReturnSeries series = generate_gaussian(sim.n_total, sim.mean, sim.variance, sim.seed);

    BacktestConfig cfg;
    cfg.alpha = sim.alpha;
    cfg.window_W = sim.window_W;
    cfg.dist_kind = kind;
    cfg.student_dof = dof;

    const std::filesystem::path out_dir(a.out_dir);
    std::filesystem::create_directories(out_dir);

    nlohmann::ordered_json report;
    report["tool"] = "compvar";
    report["tool_version"] = kVersion;
    report["generated_at_utc"] = utc_timestamp_now();
    report["command"] = "simulate";
    report["n"] = sim.n_total;
    report["alpha"] = sim.alpha;
    report["window"] = sim.window_W;
    report["dist"] = a.dist;
    report["seed"] = sim.seed;
    report["bound_L"] = series.bound_L;
    report["results"] = nlohmann::ordered_json::array();

    std::vector<std::string> artifacts = {"report.json"};
    const std::size_t steps = sim.n_total - sim.window_W;
    for (double k : sim.kappas) {
        cfg.kappa = k;
        const BacktestReport rep = run_backtest(series, cfg);
        for (const std::string& w : rep.warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        report["results"].push_back(report_entry_json(k, rep));
        const std::string label = fmt_double(k);
        const std::string traj = "trajectory_" + label + ".csv";
        write_trajectory_csv(out_dir / traj, rep);
        artifacts.push_back(traj);
        if (k > 0.0) {
            std::vector<double> band;
            band.reserve(steps);
            for (std::size_t i = 0; i < steps; ++i) {
                band.push_back(theorem1_band(series.bound_L, k,
                                             static_cast<std::uint64_t>(sim.window_W + i + 1)));
            }
            const std::string name = "band_" + label + ".csv";
            write_band_csv(out_dir / name, band);
            artifacts.push_back(name);
        }
        if (a.ensemble > 0) {
            SimConfig ens = sim;
            ens.replications = a.ensemble;
            const std::string name = "ensemble_" + label + ".csv";
            write_ensemble_csv(out_dir / name, ensemble_experiment(ens, k));
            artifacts.push_back(name);
        }
    }
    write_json(out_dir / "report.json", report);

    RunManifest man;
    man.command = "simulate";
    man.config = {{"n", a.n},           {"alpha", a.alpha},       {"kappa", a.kappas},
                  {"window", a.window}, {"dist", a.dist},         {"mean", a.mean},
                  {"variance", a.variance}, {"ensemble", a.ensemble}, {"out", a.out_dir}};
    man.seed = seed;
    man.artifacts = std::move(artifacts);
    write_json(out_dir / "manifest.json", manifest_json(man));
    return kExitOk;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"rolling VaR backtests with a feedback-compensated quantile"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    detail::BacktestArgs bt;
    CLI::App* bt_cmd = app.add_subcommand("backtest", "backtest VaR forecasts on a price CSV");
    bt_cmd->add_option("--input", bt.input, "price CSV with header 'date,close'")->required();
    bt_cmd->add_option("--alpha", bt.alpha, "target quantile level")->required();
    bt_cmd->add_option("--kappa", bt.kappas, "feedback gain(s), comma-separated")
        ->required()
        ->delimiter(',');
    bt_cmd->add_option("--window", bt.window, "rolling window length")->required();
    bt_cmd->add_option("--dist", bt.dist, "normal | empirical | t:<dof>");
    bt_cmd->add_option("--out", bt.out_dir, "output directory")->required();

    detail::SimulateArgs sm;
    std::uint64_t seed_flag = 0;
    CLI::App* sm_cmd = app.add_subcommand("simulate", "run the compensator on simulated data");
    sm_cmd->add_option("--n", sm.n, "total number of simulated returns")->required();
    sm_cmd->add_option("--window", sm.window, "rolling window length")->required();
    sm_cmd->add_option("--alpha", sm.alpha, "target quantile level")->required();
    sm_cmd->add_option("--kappa", sm.kappas, "feedback gain(s), comma-separated")
        ->required()
        ->delimiter(',');
    sm_cmd->add_option("--dist", sm.dist, "normal | empirical | t:<dof>");
    CLI::Option* seed_opt =
        sm_cmd->add_option("--seed", seed_flag, "RNG seed (falls back to COMPVAR_SEED)");
    sm_cmd->add_option("--ensemble", sm.ensemble, "number of lockstep replications");
    sm_cmd->add_option("--mean", sm.mean, "mean of the simulated returns");
    sm_cmd->add_option("--variance", sm.variance, "variance of the simulated returns");
    sm_cmd->add_option("--out", sm.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const bool is_backtest = bt_cmd->parsed();
        const double alpha = is_backtest ? bt.alpha : sm.alpha;
        if (!(alpha > 0.0 && alpha < 1.0)) {
            return detail::usage_error("alpha must be in (0, 1)");
        }
        for (double k : is_backtest ? bt.kappas : sm.kappas) {
            if (!(k >= 0.0)) {
                return detail::usage_error("kappa must be nonnegative");
            }
        }
        const std::size_t window = is_backtest ? bt.window : sm.window;
        if (window < 1) {
            return detail::usage_error("window must be a positive integer");
        }
        DistKind kind = DistKind::normal;
        double dof = 5.0;
        if (!detail::parse_dist(is_backtest ? bt.dist : sm.dist, kind, dof)) {
            return detail::usage_error("dist must be normal, empirical or t:<dof>");
        }
        if (kind == DistKind::student_t && !(dof > 2.0)) {
            return detail::usage_error("t dof must exceed 2");
        }

        if (is_backtest) {
            return detail::cmd_backtest(bt, kind, dof);
        }

        if (sm.n < sm.window + 2) {
            return detail::usage_error("n must exceed window + 1");
        }
        if (sm_cmd->count("--ensemble") > 0 && sm.ensemble < 1) {
            return detail::usage_error("ensemble replications must be positive");
        }
        std::uint64_t seed = 1;
        if (seed_opt->count() > 0) {
            seed = seed_flag;
        } else if (const char* env = std::getenv("COMPVAR_SEED");
                   env != nullptr && *env != '\0') {
            const std::string s(env);
            const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
                return detail::usage_error("COMPVAR_SEED must be an unsigned integer, got '" +
                                           s + "'");
            }
        }
        sm.seed = seed;
        return detail::cmd_simulate(sm, kind, dof, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace compvar
