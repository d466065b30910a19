#pragma once

#include "ror/config.hpp"
#include "ror/dynamics.hpp"
#include "ror/strategy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ror {

struct BacktestRow {
    int year = 0;
    std::string strategy;        // "optimal", "naive", "pde"
    std::optional<int> l;        // forecast length; only for "pde"
    double cost_ratio = 0.0;     // C/D
    double payoff = 0.0;         // m.u.
    double gamma = 0.0;
    int n_switches = 0;
    std::string events;          // "(103,1) (225,0)" style, 1-based days
    std::string error;           // non-empty if the cell failed
};

struct AverageRow {
    std::string strategy;
    std::optional<int> l;
    double cost_ratio = 0.0;
    double payoff = 0.0; // arithmetic mean over years
    double gamma = 0.0;
};

struct BacktestReport {
    std::vector<BacktestRow> rows;
    std::vector<AverageRow> averages;
    std::vector<int> years;
    double capacity_d = 0.0;
    RunConfig config;

    void write_csv(const std::string& path) const;
    void write_json(const std::string& path) const;
};

/// End-to-end calibration from the configured flow CSV; writes the
/// calibration file when one is configured.
CalibrationResult cmd_calibrate(const RunConfig& cfg);

/// Simulated flow paths over one year starting from the first backtest
/// year's day-1 flow; writes <out_dir>/paths.csv.
PathSet cmd_simulate(const RunConfig& cfg);

/// Runs the optimal, PDE (per configured forecast length) and naive
/// strategies for every configured year; writes backtest.csv and
/// backtest_summary.json. Failed cells are recorded and skipped in the
/// averages.
BacktestReport cmd_backtest(const RunConfig& cfg);

/// Backtest over a grid of C/D ratios; writes sweep.csv and
/// sweep_summary.json.
BacktestReport cmd_sweep(const RunConfig& cfg);

struct PlanResult {
    int day = 0;  // 1-based day-of-year
    int mode = 0;
    bool switch_now = false;
    int target = 0;
    std::vector<double> values;     // u_i at the queried point, m.u.
    std::vector<double> payoffs;    // f_i at the queried flow, m.u./day
    int forecast_days_used = 0;
    double capacity_d = 0.0;
};

/// Single-day decision: solves the system from the given date to year end
/// (forecast taken from the flow CSV when the following days are present)
/// and applies the switching rule at the given flow and mode.
PlanResult cmd_plan(const RunConfig& cfg, const Date& date, double flow, int mode);

} // namespace ror
