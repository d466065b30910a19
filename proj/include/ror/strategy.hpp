#pragma once

#include "ror/calibration.hpp"
#include "ror/plant.hpp"
#include "ror/vi_solver.hpp"

#include <string>
#include <vector>

namespace ror {

struct SwitchEvent {
    int day = 0;  // 0-based day index; reports print day + 1 (day-of-year)
    int from = 0;
    int to = 0;
    double cost = 0.0; // m.u.
};

/// Realized mode path of one controller over a planning horizon, starting
/// from mode 0. realized_payoff always equals the recomputation from the
/// flow path (the payoff sum minus all switching costs, including the
/// initial move away from mode 0).
struct ModeSchedule {
    std::string label;
    std::vector<int> modes;          // mode per day
    std::vector<SwitchEvent> events;
    double realized_payoff = 0.0;    // m.u.
    int forecast_days = 0;           // l
    int relax_days = 0;              // ell
    int clamped_decisions = 0;

    /// Tables-style event list, e.g. "(103,1) (225,0)" with 1-based days.
    std::string events_string() const;
};

/// Discretized payoff of a mode path: sum of f_mode(Q_n) per day minus
/// every switching cost, with the path starting from mode 0. Throws on a
/// length mismatch.
double realized_payoff(const std::vector<int>& modes, const std::vector<double>& flows,
                       const PlantSpec& plant, double price);

/// Occupies the mode with the highest instantaneous payoff each day; ties
/// keep the current mode. Switching costs are charged but never influence
/// the choice.
ModeSchedule run_naive_strategy(const std::vector<double>& flows, const PlantSpec& plant,
                                double price);

/// Exact backward dynamic program over (day, mode); globally optimal for
/// the discretized payoff when the whole flow path is known. Ties resolve
/// to the lowest mode index.
ModeSchedule run_hindsight_optimal(const std::vector<double>& flows, const PlantSpec& plant,
                                   double price);

struct PdeStrategyOptions {
    int forecast_days = 10;    // l; 0 disables forecasts
    int relax_days = 20;       // ell
    int grid_nodes = 161;
    double grid_padding_sd = 5.0;
    double price = 1.0;
    SolveOptions solve;        // scale via default_solve_options(D)
};

/// Rolling-horizon controller: each day the variational-inequality system
/// is re-solved with the drift blended from the day's forecast (the true
/// future flows, per the backtest protocol) and the switching rule is
/// evaluated at the observed flow. With no forecast a single backward
/// solve over the whole year serves every day. With a forecast, the day
/// solve runs only over the blended window and is spliced onto the
/// no-forecast solution where the coefficients coincide.
ModeSchedule run_pde_strategy(const std::vector<double>& flows, const PlantSpec& plant,
                              const SeasonalProfile& profile, const OUParams& ou,
                              const PdeStrategyOptions& opts);

/// payoff / D. D must be positive.
double gamma_ratio(double payoff, double capacity_d);

} // namespace ror
