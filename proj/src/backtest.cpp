#include "ror/backtest.hpp"

#include "ror/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace ror {

namespace {

using nlohmann::json;

CalibrationResult obtain_calibration(const RunConfig& cfg) {
    if (!cfg.calibration_file.empty() &&
        std::filesystem::exists(cfg.calibration_file))
        return load_calibration(cfg.calibration_file);

    const FlowSeries cleaned = clean_series(read_flow_csv(cfg.flow_csv));
    CalibrationResult calib;
    calib.window_days = cfg.window_days;
    calib.max_lag_days = cfg.max_lag_days;
    calib.profile = seasonal_log_mean(cleaned, cfg.window_days);
    const OUEstimate est = estimate_ou(residuals(cleaned, calib.profile), cfg.max_lag_days);
    calib.ou = est.params;
    return calib;
}

std::vector<int> select_years(const FlowSeries& cleaned, const RunConfig& cfg) {
    std::vector<int> years = complete_years(cleaned);
    if (years.empty()) throw DataError("no complete years in the flow data");
    std::vector<int> out;
    for (int y : years) {
        if (cfg.year_from != 0 && y < cfg.year_from) continue;
        if (cfg.year_to != 0 && y > cfg.year_to) continue;
        out.push_back(y);
    }
    if (out.empty()) throw ConfigError("configured year range selects no complete year");
    return out;
}

PlantSpec plant_with_costs(const RunConfig& cfg, double cost_ratio, double capacity_d) {
    PlantSpec plant = cfg.plant;
    if (cfg.has_explicit_costs)
        plant.switch_costs = cfg.explicit_costs;
    else
        plant.switch_costs = relative_switch_costs(cost_ratio * capacity_d, plant.modes());
    plant.validate();
    return plant;
}

SolveOptions solve_options(const RunConfig& cfg, double capacity_d) {
    const double scale = std::max(std::abs(capacity_d), 1.0);
    SolveOptions opts;
    opts.spatial_tol = cfg.spatial_tol_rel * scale;
    opts.total_tol = cfg.total_tol_rel * scale;
    opts.decision_tol = cfg.total_tol_rel * scale;
    opts.max_outer = cfg.max_outer;
    opts.max_inner = cfg.max_inner;
    return opts;
}

std::string csv_field(const std::optional<int>& l) {
    return l ? std::to_string(*l) : std::string{};
}

/// Strategies for one (year, cost_ratio) cell.
struct CellResult {
    std::vector<BacktestRow> rows;
};

CellResult run_cell(const RunConfig& cfg, const CalibrationResult& calib, int year,
                    const std::vector<double>& flows, double cost_ratio, double capacity_d,
                    const std::vector<int>& forecast_lengths) {
    const PlantSpec plant = plant_with_costs(cfg, cost_ratio, capacity_d);
    CellResult cell;

    auto add_row = [&](const std::string& strategy, std::optional<int> l,
                       const ModeSchedule& schedule) {
        BacktestRow row;
        row.year = year;
        row.strategy = strategy;
        row.l = l;
        row.cost_ratio = cost_ratio;
        row.payoff = schedule.realized_payoff;
        row.gamma = gamma_ratio(schedule.realized_payoff, capacity_d);
        row.n_switches = static_cast<int>(schedule.events.size());
        row.events = schedule.events_string();
        cell.rows.push_back(row);
    };
    auto add_error = [&](const std::string& strategy, std::optional<int> l,
                         const std::string& message) {
        BacktestRow row;
        row.year = year;
        row.strategy = strategy;
        row.l = l;
        row.cost_ratio = cost_ratio;
        row.error = message;
        cell.rows.push_back(row);
    };

    try {
        add_row("optimal", std::nullopt, run_hindsight_optimal(flows, plant, cfg.price));
    } catch (const std::exception& e) {
        add_error("optimal", std::nullopt, e.what());
    }
    for (int l : forecast_lengths) {
        try {
            PdeStrategyOptions opts;
            opts.forecast_days = l;
            opts.relax_days = cfg.relax_days;
            opts.grid_nodes = cfg.grid_nodes;
            opts.grid_padding_sd = cfg.grid_padding_sd;
            opts.price = cfg.price;
            opts.solve = solve_options(cfg, capacity_d);
            add_row("pde", l, run_pde_strategy(flows, plant, calib.profile, calib.ou, opts));
        } catch (const std::exception& e) {
            add_error("pde", l, e.what());
        }
    }
    try {
        add_row("naive", std::nullopt, run_naive_strategy(flows, plant, cfg.price));
    } catch (const std::exception& e) {
        add_error("naive", std::nullopt, e.what());
    }
    return cell;
}

void append_averages(BacktestReport& report) {
    struct Key {
        std::string strategy;
        int l; // -1 = n/a
        double cost_ratio;
        bool operator<(const Key& o) const {
            return std::tie(strategy, l, cost_ratio) < std::tie(o.strategy, o.l, o.cost_ratio);
        }
    };
    std::map<Key, std::vector<const BacktestRow*>> groups;
    for (const auto& row : report.rows) {
        if (!row.error.empty()) continue;
        groups[{row.strategy, row.l.value_or(-1), row.cost_ratio}].push_back(&row);
    }
    for (const auto& [key, rows] : groups) {
        AverageRow avg;
        avg.strategy = key.strategy;
        if (key.l >= 0) avg.l = key.l;
        avg.cost_ratio = key.cost_ratio;
        for (const auto* row : rows) {
            avg.payoff += row->payoff;
            avg.gamma += row->gamma;
        }
        avg.payoff /= static_cast<double>(rows.size());
        avg.gamma /= static_cast<double>(rows.size());
        report.averages.push_back(avg);
    }
}

BacktestReport run_backtest(const RunConfig& cfg, const std::vector<double>& cost_ratios,
                            const std::vector<int>& forecast_lengths) {
    const CalibrationResult calib = obtain_calibration(cfg);
    const FlowSeries cleaned = clean_series(read_flow_csv(cfg.flow_csv));
    const std::vector<int> years = select_years(cleaned, cfg);

    PlantSpec probe = cfg.plant;
    probe.switch_costs = relative_switch_costs(0.0, probe.modes());
    probe.validate();
    const double capacity_d = capacity_benchmark(probe, cfg.price);
    if (!(capacity_d > 0.0))
        throw ConfigError("capacity benchmark D is not positive; gamma is undefined");

    struct Task {
        int year;
        double ratio;
        std::vector<double> flows;
    };
    std::vector<Task> tasks;
    for (int year : years)
        for (double ratio : cost_ratios)
            tasks.push_back({year, ratio, year_flows(cleaned, year)});

    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(tasks.size()));
    std::vector<CellResult> cells(tasks.size());
    std::atomic<std::size_t> cursor{0};
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w)
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = cursor.fetch_add(1); i < tasks.size();
                 i = cursor.fetch_add(1))
                cells[i] = run_cell(cfg, calib, tasks[i].year, tasks[i].flows,
                                    tasks[i].ratio, capacity_d, forecast_lengths);
        }));
    for (auto& f : futures) f.get();

    BacktestReport report;
    report.years = years;
    report.capacity_d = capacity_d;
    report.config = cfg;
    for (const auto& cell : cells)
        report.rows.insert(report.rows.end(), cell.rows.begin(), cell.rows.end());
    append_averages(report);
    return report;
}

json metadata_json(const BacktestReport& report) {
    const RunConfig& cfg = report.config;
    json meta;
    meta["flow_csv"] = cfg.flow_csv;
    meta["price"] = cfg.price;
    meta["capacity_d"] = report.capacity_d;
    meta["units"] = cfg.plant.units.size();
    meta["grid_nodes"] = cfg.grid_nodes;
    meta["grid_padding_sd"] = cfg.grid_padding_sd;
    meta["spatial_tol_rel"] = cfg.spatial_tol_rel;
    meta["total_tol_rel"] = cfg.total_tol_rel;
    meta["relax_days"] = cfg.relax_days;
    meta["seed"] = cfg.seed;
    meta["years"] = report.years;
    meta["day_convention"] = "events use 1-based day-of-year";
    meta["initial_switch_charged"] = true;
    return meta;
}

json row_json(const BacktestRow& row) {
    json r;
    r["year"] = row.year;
    r["strategy"] = row.strategy;
    if (row.l)
        r["l"] = *row.l;
    else
        r["l"] = nullptr;
    r["cost_ratio"] = row.cost_ratio;
    if (row.error.empty()) {
        r["payoff"] = row.payoff;
        r["gamma"] = row.gamma;
        r["n_switches"] = row.n_switches;
        r["events"] = row.events;
    } else {
        r["error"] = row.error;
    }
    return r;
}

} // namespace

void BacktestReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write report CSV '" + path + "'");
    out.precision(10);
    out << "year,strategy,l,cost_ratio,payoff,gamma,n_switches,events,error\n";
    for (const auto& row : rows) {
        out << row.year << "," << row.strategy << "," << csv_field(row.l) << ","
            << row.cost_ratio << ",";
        if (row.error.empty())
            out << row.payoff << "," << row.gamma << "," << row.n_switches << ",\""
                << row.events << "\",";
        else
            out << ",,,,\"" << row.error << "\"";
        out << "\n";
    }
    for (const auto& avg : averages)
        out << "average," << avg.strategy << "," << csv_field(avg.l) << ","
            << avg.cost_ratio << "," << avg.payoff << "," << avg.gamma << ",,,\n";
}

void BacktestReport::write_json(const std::string& path) const {
    json j;
    j["metadata"] = metadata_json(*this);
    j["rows"] = json::array();
    for (const auto& row : rows) j["rows"].push_back(row_json(row));
    j["averages"] = json::array();
    for (const auto& avg : averages) {
        json a;
        a["strategy"] = avg.strategy;
        if (avg.l)
            a["l"] = *avg.l;
        else
            a["l"] = nullptr;
        a["cost_ratio"] = avg.cost_ratio;
        a["payoff"] = avg.payoff;
        a["gamma"] = avg.gamma;
        j["averages"].push_back(a);
    }
    std::ofstream out(path);
    if (!out) throw DataError("cannot write report JSON '" + path + "'");
    out << j.dump(2) << "\n";
}

CalibrationResult cmd_calibrate(const RunConfig& cfg) {
    const FlowSeries cleaned = clean_series(read_flow_csv(cfg.flow_csv));
    CalibrationResult calib;
    calib.window_days = cfg.window_days;
    calib.max_lag_days = cfg.max_lag_days;
    calib.profile = seasonal_log_mean(cleaned, cfg.window_days);
    const OUEstimate est = estimate_ou(residuals(cleaned, calib.profile), cfg.max_lag_days);
    calib.ou = est.params;

    std::filesystem::create_directories(cfg.out_dir);
    const std::string path = cfg.calibration_file.empty()
                                 ? cfg.out_dir + "/calibration.json"
                                 : cfg.calibration_file;
    save_calibration(calib, path);
    return calib;
}

PathSet cmd_simulate(const RunConfig& cfg) {
    const CalibrationResult calib = obtain_calibration(cfg);
    const FlowSeries cleaned = clean_series(read_flow_csv(cfg.flow_csv));
    const std::vector<int> years = select_years(cleaned, cfg);
    const double q0 = year_flows(cleaned, years.front())[0];

    const DriftSpec drift(0, calib.profile, calib.ou);
    PathSet paths = simulate_paths(q0, drift, cfg.n_paths, 366, 1.0, cfg.seed);
    std::filesystem::create_directories(cfg.out_dir);
    write_paths_csv(paths, cfg.out_dir + "/paths.csv");
    return paths;
}

BacktestReport cmd_backtest(const RunConfig& cfg) {
    BacktestReport report = run_backtest(cfg, {cfg.cost_ratio}, cfg.forecast_lengths);
    std::filesystem::create_directories(cfg.out_dir);
    report.write_csv(cfg.out_dir + "/backtest.csv");
    report.write_json(cfg.out_dir + "/backtest_summary.json");
    return report;
}

BacktestReport cmd_sweep(const RunConfig& cfg) {
    std::vector<double> ratios(cfg.sweep_steps);
    for (int i = 0; i < cfg.sweep_steps; ++i)
        ratios[i] = cfg.sweep_from +
                    (cfg.sweep_to - cfg.sweep_from) * i / (cfg.sweep_steps - 1);
    BacktestReport report = run_backtest(cfg, ratios, cfg.forecast_lengths);
    std::filesystem::create_directories(cfg.out_dir);
    report.write_csv(cfg.out_dir + "/sweep.csv");
    report.write_json(cfg.out_dir + "/sweep_summary.json");
    return report;
}

PlanResult cmd_plan(const RunConfig& cfg, const Date& date, double flow, int mode) {
    if (!(flow > 0.0)) throw DataError("plan: flow must be positive");
    if (date.is_leap_day()) throw DataError("plan: leap days are not planning days");
    const CalibrationResult calib = obtain_calibration(cfg);

    PlantSpec probe = cfg.plant;
    probe.switch_costs = relative_switch_costs(0.0, probe.modes());
    probe.validate();
    const double capacity_d = capacity_benchmark(probe, cfg.price);
    if (!(capacity_d > 0.0))
        throw ConfigError("capacity benchmark D is not positive; gamma is undefined");
    const PlantSpec plant = plant_with_costs(cfg, cfg.cost_ratio, capacity_d);
    if (mode < 0 || mode >= plant.modes()) throw ConfigError("plan: mode out of range");

    const int k = date.day_of_year_365() - 1;
    if (k > 364) throw DataError("plan: day index out of range");

    // True-flow forecast from the configured CSV when the next days exist.
    ForecastSpec forecast;
    forecast.start_index = k;
    forecast.relax_days = cfg.relax_days;
    if (cfg.forecast_days > 0) {
        const FlowSeries cleaned = clean_series(read_flow_csv(cfg.flow_csv));
        std::map<std::pair<int, int>, double> by_day; // (year, doy) -> flow
        for (const auto& rec : cleaned.records)
            by_day[{rec.date.year, rec.date.day_of_year_365()}] = rec.flow;
        for (int i = 1; i <= std::min(cfg.forecast_days, 364 - k); ++i) {
            const auto it = by_day.find({date.year, k + i + 1});
            if (it == by_day.end()) break;
            forecast.values.push_back(it->second);
        }
    }

    const Grid grid = Grid::from_model(calib.profile, calib.ou, cfg.grid_nodes,
                                       cfg.grid_padding_sd);
    const PayoffTable payoffs = build_payoff_table(grid, plant, cfg.price);
    const DriftSpec drift = build_drift(k, flow, forecast, calib.profile, calib.ou);
    const ValueFunction vf = solve(grid, drift, payoffs, plant.switch_costs,
                                   solve_options(cfg, capacity_d));

    PlanResult result;
    result.day = k + 1;
    result.mode = mode;
    result.forecast_days_used = forecast.horizon();
    result.capacity_d = capacity_d;
    const double x = std::log(flow);
    const SwitchDecision decision = vf.switch_decision(x, k, mode);
    result.switch_now = decision.switch_now;
    result.target = decision.switch_now ? decision.target : mode;
    for (int i = 0; i < plant.modes(); ++i)
        result.values.push_back(
            vf.value_at(i, x, k, ValueFunction::OutOfGrid::Clamp));
    result.payoffs = payoff_vector(flow, cfg.price, plant);
    return result;
}

} // namespace ror
