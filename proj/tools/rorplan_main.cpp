#include "ror/backtest.hpp"
#include "ror/errors.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

void print_calibration(const ror::CalibrationResult& calib) {
    std::printf("kappa = %.6f per day\n", calib.ou.kappa);
    std::printf("sigma = %.6f per sqrt(day)\n", calib.ou.sigma);
    std::printf("asymptotic sd of log-flow residual = %.4f\n", calib.ou.asymptotic_sd());
    std::printf("seasonal log-mean range = [%.4f, %.4f]\n",
                calib.profile.min_log_mean(), calib.profile.max_log_mean());
}

void print_report_summary(const ror::BacktestReport& report) {
    std::printf("capacity benchmark D = %.2f m.u.\n", report.capacity_d);
    std::printf("%-8s %-8s %-4s %-10s %-12s %-8s\n", "year", "strategy", "l", "C/D",
                "payoff", "gamma");
    for (const auto& row : report.rows) {
        if (!row.error.empty()) {
            std::printf("%-8d %-8s %-4s %-10.4f failed: %s\n", row.year,
                        row.strategy.c_str(), row.l ? std::to_string(*row.l).c_str() : "-",
                        row.cost_ratio, row.error.c_str());
            continue;
        }
        std::printf("%-8d %-8s %-4s %-10.4f %-12.1f %-8.4f  %s\n", row.year,
                    row.strategy.c_str(), row.l ? std::to_string(*row.l).c_str() : "-",
                    row.cost_ratio, row.payoff, row.gamma, row.events.c_str());
    }
    for (const auto& avg : report.averages)
        std::printf("%-8s %-8s %-4s %-10.4f %-12.1f %-8.4f\n", "average",
                    avg.strategy.c_str(), avg.l ? std::to_string(*avg.l).c_str() : "-",
                    avg.cost_ratio, avg.payoff, avg.gamma);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Start/stop planning and backtesting for run-of-river hydropower"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file")->required();

    auto* calibrate = app.add_subcommand(
        "calibrate", "Fit the seasonal profile and residual parameters from the flow CSV");
    auto* simulate = app.add_subcommand(
        "simulate", "Simulate flow paths over a year from the calibrated model");
    auto* backtest = app.add_subcommand(
        "backtest", "Run all strategies over the configured years and tabulate gamma");
    auto* sweep = app.add_subcommand(
        "sweep", "Backtest over a grid of C/D cost ratios");

    auto* plan = app.add_subcommand(
        "plan", "Single-day decision for a given date, flow and current mode");
    std::string plan_date;
    double plan_flow = 0.0;
    int plan_mode = 0;
    plan->add_option("--date", plan_date, "ISO date, e.g. 2015-04-13")->required();
    plan->add_option("--flow", plan_flow, "observed flow, m^3/s")->required();
    plan->add_option("--mode", plan_mode, "current production mode")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const ror::RunConfig cfg = ror::load_config(config_path);
        if (calibrate->parsed()) {
            print_calibration(ror::cmd_calibrate(cfg));
        } else if (simulate->parsed()) {
            const ror::PathSet paths = ror::cmd_simulate(cfg);
            std::printf("wrote %zu paths x %zu steps to %s/paths.csv (seed %llu)\n",
                        paths.n_paths(), paths.n_steps(), cfg.out_dir.c_str(),
                        static_cast<unsigned long long>(paths.seed));
        } else if (backtest->parsed()) {
            print_report_summary(ror::cmd_backtest(cfg));
            std::printf("wrote %s/backtest.csv and backtest_summary.json\n",
                        cfg.out_dir.c_str());
        } else if (sweep->parsed()) {
            const ror::BacktestReport report = ror::cmd_sweep(cfg);
            std::printf("swept %zu cells; wrote %s/sweep.csv and sweep_summary.json\n",
                        report.rows.size(), cfg.out_dir.c_str());
        } else if (plan->parsed()) {
            const ror::Date date = ror::parse_iso_date(plan_date);
            const ror::PlanResult result = ror::cmd_plan(cfg, date, plan_flow, plan_mode);
            std::printf("day %d, flow %.3f m^3/s, mode %d (forecast %d days)\n",
                        result.day, plan_flow, result.mode, result.forecast_days_used);
            for (std::size_t i = 0; i < result.values.size(); ++i)
                std::printf("  u_%zu = %.1f m.u., f_%zu = %.1f m.u./day\n", i,
                            result.values[i], i, result.payoffs[i]);
            if (result.switch_now)
                std::printf("decision: switch to mode %d\n", result.target);
            else
                std::printf("decision: stay in mode %d\n", result.mode);
        }
    } catch (const ror::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ror::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ror::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
