#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ror {

/// One turbine/generator unit. Defaults follow the reference configuration
/// used throughout the tests: 5 m head, design flow 10 m^3/s.
struct UnitSpec {
    double q_min = 5.0;    // m^3/s
    double q_max = 13.0;   // m^3/s
    double q_d = 10.0;     // m^3/s, design flow
    double alpha = 0.92;   // efficiency at design flow
    double beta = 0.45;    // efficiency curvature
    double c_run = 100.0;  // m.u./h
    double c_low = 1000.0; // m.u./h, penalty for running below q_min
    double head = 5.0;     // m
    double rho = 1000.0;   // kg/m^3
    double gravity = 9.82; // m/s^2

    /// rho * g * h, the W per (m^3/s) of perfectly converted flow.
    double head_constant() const { return rho * gravity * head; }
};

enum class CapacityConvention {
    TotalCapacity, // benchmark flow saturates every unit (default)
    PerUnitQMax,   // literal single-unit q_max fed to the top mode
};

/// A plant is 1 or 2 units. Modes are 0 (off), 1 (unit 1 running) and,
/// with two units, 2 (both running with an optimized flow split).
struct PlantSpec {
    std::vector<UnitSpec> units;                   // size 1 or 2
    std::vector<std::vector<double>> switch_costs; // m x m, m.u.
    int delta_grid_size = 101;
    CapacityConvention capacity_convention = CapacityConvention::TotalCapacity;
    bool allow_negative_switch_costs = false;

    int modes() const { return static_cast<int>(units.size()) + 1; }

    void validate() const; // throws ConfigError on a broken spec
};

/// Quadratic efficiency curve peaked at the design flow; no clamping.
double efficiency(double q, const UnitSpec& u);

/// Per-hour payoff of one running unit: -c_run plus the low-flow penalty
/// or the electricity revenue (price in m.u./kWh, output converted W->kW).
double payoff_single(double q, double price, const UnitSpec& u);

/// Best split of flow q across two running units; returns (m.u./h, delta).
/// A unit fed less than its q_min pays its c_low. Deterministic grid search
/// with golden-section refinement; value ties resolve toward delta = 0.5.
std::pair<double, double> payoff_two(double q, double price, const UnitSpec& u1,
                                     const UnitSpec& u2, int grid_size = 101);

/// Yearly profit of uninterrupted top-mode production, m.u. The top mode
/// is evaluated at saturation flow per the plant's capacity convention.
double capacity_benchmark(const PlantSpec& plant, double price);

/// Per-mode payoffs in m.u./day (hourly values times 24). Mode 0 is 0.
std::vector<double> payoff_vector(double q, double price, const PlantSpec& plant);

/// Switching-cost matrix with the relative structure: adjacent mode changes
/// cost c, the direct 0<->2 jump costs 1.5c.
std::vector<std::vector<double>> relative_switch_costs(double c, int modes);

/// Single-unit plant with the given switching-cost constant.
PlantSpec make_plant_one(double cost_c, const UnitSpec& unit = UnitSpec{});

/// Two-unit plant; homogeneous by default.
PlantSpec make_plant_two(double cost_c, const UnitSpec& u1 = UnitSpec{},
                         const UnitSpec& u2 = UnitSpec{});

} // namespace ror
