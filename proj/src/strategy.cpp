#include "ror/strategy.hpp"

#include "ror/errors.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace ror {

namespace {

std::vector<std::vector<double>> daily_payoffs(const std::vector<double>& flows,
                                               const PlantSpec& plant, double price) {
    std::vector<std::vector<double>> f(flows.size());
    for (std::size_t n = 0; n < flows.size(); ++n)
        f[n] = payoff_vector(flows[n], price, plant);
    return f;
}

} // namespace

std::string ModeSchedule::events_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i) os << " ";
        os << "(" << events[i].day + 1 << "," << events[i].to << ")";
    }
    return os.str();
}

double realized_payoff(const std::vector<int>& modes, const std::vector<double>& flows,
                       const PlantSpec& plant, double price) {
    if (modes.size() != flows.size())
        throw DataError("realized_payoff: schedule and flow path lengths differ");
    constexpr double dt = 1.0;
    double total = 0.0;
    int prev = 0;
    for (std::size_t n = 0; n < modes.size(); ++n) {
        const int mode = modes[n];
        if (mode < 0 || mode >= plant.modes())
            throw DataError("realized_payoff: mode out of range");
        if (mode != prev) total -= plant.switch_costs[prev][mode];
        total += payoff_vector(flows[n], price, plant)[mode] * dt;
        prev = mode;
    }
    return total;
}

ModeSchedule run_naive_strategy(const std::vector<double>& flows, const PlantSpec& plant,
                                double price) {
    if (flows.empty()) throw DataError("run_naive_strategy: empty flow path");
    const auto f = daily_payoffs(flows, plant, price);

    ModeSchedule schedule;
    schedule.label = "naive";
    schedule.modes.resize(flows.size());

    int mode = 0;
    for (std::size_t n = 0; n < flows.size(); ++n) {
        int best = mode;
        double best_value = f[n][mode];
        for (int j = 0; j < plant.modes(); ++j) {
            if (f[n][j] > best_value) {
                best = j;
                best_value = f[n][j];
            }
        }
        if (best != mode) {
            schedule.events.push_back(
                {static_cast<int>(n), mode, best, plant.switch_costs[mode][best]});
            mode = best;
        }
        schedule.modes[n] = mode;
    }
    schedule.realized_payoff = realized_payoff(schedule.modes, flows, plant, price);
    return schedule;
}

ModeSchedule run_hindsight_optimal(const std::vector<double>& flows, const PlantSpec& plant,
                                   double price) {
    if (flows.empty()) throw DataError("run_hindsight_optimal: empty flow path");
    const auto f = daily_payoffs(flows, plant, price);
    const int m = plant.modes();
    const std::size_t n_days = flows.size();
    constexpr double dt = 1.0;

    // V[n][i]: best payoff from day n onward when entering the day in mode i.
    std::vector<std::vector<double>> value(n_days + 1, std::vector<double>(m, 0.0));
    std::vector<std::vector<int>> choice(n_days, std::vector<int>(m, 0));
    for (std::size_t n = n_days; n-- > 0;) {
        for (int i = 0; i < m; ++i) {
            int best_j = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < m; ++j) {
                const double v = -plant.switch_costs[i][j] + f[n][j] * dt + value[n + 1][j];
                if (v > best) {
                    best = v;
                    best_j = j;
                }
            }
            value[n][i] = best;
            choice[n][i] = best_j;
        }
    }

    ModeSchedule schedule;
    schedule.label = "optimal";
    schedule.modes.resize(n_days);
    int mode = 0;
    for (std::size_t n = 0; n < n_days; ++n) {
        const int next = choice[n][mode];
        if (next != mode) {
            schedule.events.push_back(
                {static_cast<int>(n), mode, next, plant.switch_costs[mode][next]});
            mode = next;
        }
        schedule.modes[n] = mode;
    }
    schedule.realized_payoff = realized_payoff(schedule.modes, flows, plant, price);
    return schedule;
}

ModeSchedule run_pde_strategy(const std::vector<double>& flows, const PlantSpec& plant,
                              const SeasonalProfile& profile, const OUParams& ou,
                              const PdeStrategyOptions& opts) {
    if (flows.size() != 365)
        throw DataError("run_pde_strategy: flow path must cover 365 days");
    if (opts.forecast_days < 0 || opts.relax_days < 1)
        throw ConfigError("run_pde_strategy: need forecast_days >= 0, relax_days >= 1");

    const Grid grid = Grid::from_model(profile, ou, opts.grid_nodes, opts.grid_padding_sd);
    const PayoffTable payoffs = build_payoff_table(grid, plant, opts.price);

    const DriftSpec base_drift(0, profile, ou);
    const ValueFunction base = solve(grid, base_drift, payoffs, plant.switch_costs, opts.solve);

    ModeSchedule schedule;
    schedule.label = "pde";
    schedule.forecast_days = opts.forecast_days;
    schedule.relax_days = opts.relax_days;
    schedule.modes.resize(365);

    int mode = 0;
    for (int k = 0; k < 365; ++k) {
        const double x_now = std::log(flows[k]);
        const int l_eff = std::min(opts.forecast_days, 364 - k);

        SwitchDecision decision;
        if (l_eff == 0) {
            decision = base.switch_decision(x_now, k, mode);
        } else {
            ForecastSpec forecast;
            forecast.start_index = k;
            forecast.relax_days = opts.relax_days;
            forecast.values.assign(flows.begin() + k + 1, flows.begin() + k + 1 + l_eff);
            const DriftSpec day_drift =
                build_drift(k, flows[k], forecast, profile, ou);

            // Beyond the blended window the coefficients equal the
            // no-forecast ones, so the backward solve can start from the
            // base solution one level above the window.
            const int splice_end = std::min(day_drift.window_end() + 1, 365);
            TerminalCondition terminal;
            if (splice_end < 365) {
                terminal.g.assign(plant.modes(), std::vector<double>(grid.nodes));
                for (int i = 0; i < plant.modes(); ++i)
                    for (int j = 0; j < grid.nodes; ++j)
                        terminal.g[i][j] = base.at(i, splice_end, j);
            }
            const ValueFunction day_vf = [&] {
                try {
                    return solve(grid, day_drift, payoffs, plant.switch_costs, opts.solve,
                                 splice_end, terminal);
                } catch (const ConvergenceError& e) {
                    throw ConvergenceError("run_pde_strategy: day " + std::to_string(k + 1) +
                                           ": " + e.what());
                }
            }();
            decision = day_vf.switch_decision(x_now, k, mode);
        }

        if (decision.clamped) {
            ++schedule.clamped_decisions;
            std::cerr << "warning: day " << k + 1 << ": log-flow " << x_now
                      << " outside the value grid, clamped\n";
        }
        if (decision.switch_now && decision.target != mode) {
            schedule.events.push_back(
                {k, mode, decision.target, plant.switch_costs[mode][decision.target]});
            mode = decision.target;
        }
        schedule.modes[k] = mode;
    }

    schedule.realized_payoff = realized_payoff(schedule.modes, flows, plant, opts.price);
    return schedule;
}

double gamma_ratio(double payoff, double capacity_d) {
    if (!(capacity_d > 0.0))
        throw ConfigError("gamma requires a positive capacity benchmark D");
    return payoff / capacity_d;
}

} // namespace ror
