#pragma once

#include "ror/plant.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ror {

/// Experiment configuration. Every field except flow_csv has a default,
/// so a minimal config file is just {"flow_csv": "path"}.
struct RunConfig {
    std::string flow_csv;
    std::string calibration_file; // empty: calibrate in memory when needed
    std::string out_dir = ".";

    PlantSpec plant{{UnitSpec{}}}; // switch_costs filled from cost_ratio * D
    bool has_explicit_costs = false;
    std::vector<std::vector<double>> explicit_costs;
    double cost_ratio = 0.01;     // C/D
    double price = 1.0;           // m.u./kWh, constant

    int forecast_days = 10;       // l for plan/sweep
    int relax_days = 20;          // ell
    std::vector<int> forecast_lengths = {0, 5, 10}; // backtest l set

    int year_from = 0;            // 0 = first complete year
    int year_to = 0;              // 0 = last complete year

    int grid_nodes = 161;
    double grid_padding_sd = 5.0;

    double spatial_tol_rel = 1e-8; // x capacity benchmark D
    double total_tol_rel = 1e-6;   // x D
    int max_outer = 200;
    int max_inner = 20000;

    std::uint64_t seed = 20200615;
    int n_paths = 5;

    int window_days = 7;
    int max_lag_days = 30;

    double sweep_from = 0.002;
    double sweep_to = 0.03;
    int sweep_steps = 15;

    void validate() const; // throws ConfigError
};

/// Loads the JSON config file; unknown keys are rejected to catch typos.
RunConfig load_config(const std::string& path);

} // namespace ror
