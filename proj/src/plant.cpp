#include "ror/plant.hpp"

#include "ror/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ror {

namespace {

constexpr double kHoursPerDay = 24.0;
constexpr double kWattsPerKilowatt = 1000.0;

double two_unit_value(double q, double price, const UnitSpec& u1, const UnitSpec& u2,
                      double delta) {
    return payoff_single(delta * q, price, u1) + payoff_single((1.0 - delta) * q, price, u2);
}

} // namespace

void PlantSpec::validate() const {
    if (units.empty() || units.size() > 2)
        throw ConfigError("plant must have 1 or 2 units");
    for (const auto& u : units) {
        if (!(0.0 < u.q_min && u.q_min < u.q_d && u.q_d < u.q_max))
            throw ConfigError("unit flows must satisfy 0 < q_min < q_d < q_max");
        if (!(u.alpha > 0.0 && u.alpha <= 1.0))
            throw ConfigError("unit alpha must lie in (0, 1]");
        if (u.beta < 0.0) throw ConfigError("unit beta must be non-negative");
        if (!(efficiency(u.q_min, u) > 0.0 && efficiency(u.q_max, u) > 0.0))
            throw ConfigError("unit efficiency must stay positive on [q_min, q_max]");
        if (!(u.head > 0.0 && u.rho > 0.0 && u.gravity > 0.0))
            throw ConfigError("unit head, rho, gravity must be positive");
    }
    const int m = modes();
    if (switch_costs.size() != static_cast<std::size_t>(m))
        throw ConfigError("switch cost matrix must be modes x modes");
    for (int i = 0; i < m; ++i) {
        if (switch_costs[i].size() != static_cast<std::size_t>(m))
            throw ConfigError("switch cost matrix must be modes x modes");
        if (switch_costs[i][i] != 0.0)
            throw ConfigError("switch cost matrix diagonal must be zero");
        for (int j = 0; j < m; ++j)
            if (i != j && switch_costs[i][j] < 0.0 && !allow_negative_switch_costs)
                throw ConfigError("negative switch costs require the explicit flag");
    }
    if (delta_grid_size < 2) throw ConfigError("delta_grid_size must be >= 2");
}

double efficiency(double q, const UnitSpec& u) {
    const double rel = q / u.q_d - 1.0;
    return u.alpha - u.beta * rel * rel;
}

double payoff_single(double q, double price, const UnitSpec& u) {
    if (q < u.q_min) return -u.c_run - u.c_low;
    const double q_eff = std::min(q, u.q_max);
    const double watts = u.head_constant() * efficiency(q_eff, u) * q_eff;
    return price * watts / kWattsPerKilowatt - u.c_run;
}

std::pair<double, double> payoff_two(double q, double price, const UnitSpec& u1,
                                     const UnitSpec& u2, int grid_size) {
    if (grid_size < 2) throw ConfigError("payoff_two: grid_size must be >= 2");

    // Deterministic coarse grid; ties go to the split closest to 0.5.
    double best_delta = 0.0;
    double best_value = two_unit_value(q, price, u1, u2, 0.0);
    const int cells = grid_size - 1;
    for (int i = 1; i <= cells; ++i) {
        const double delta = static_cast<double>(i) / cells;
        const double value = two_unit_value(q, price, u1, u2, delta);
        if (value > best_value ||
            (value == best_value && std::abs(delta - 0.5) < std::abs(best_delta - 0.5))) {
            best_value = value;
            best_delta = delta;
        }
    }

    // Golden-section refinement inside the bracketing cells.
    const double step = 1.0 / cells;
    double lo = std::max(0.0, best_delta - step);
    double hi = std::min(1.0, best_delta + step);
    constexpr double kInvPhi = 0.6180339887498949;
    double a = hi - kInvPhi * (hi - lo);
    double b = lo + kInvPhi * (hi - lo);
    double fa = two_unit_value(q, price, u1, u2, a);
    double fb = two_unit_value(q, price, u1, u2, b);
    while (hi - lo > 1e-6) {
        if (fa >= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kInvPhi * (hi - lo);
            fa = two_unit_value(q, price, u1, u2, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kInvPhi * (hi - lo);
            fb = two_unit_value(q, price, u1, u2, b);
        }
    }
    const double mid = 0.5 * (lo + hi);
    const double fmid = two_unit_value(q, price, u1, u2, mid);
    if (fmid > best_value || (fmid == best_value && std::abs(mid - 0.5) < std::abs(best_delta - 0.5))) {
        best_value = fmid;
        best_delta = mid;
    }
    return {best_value, best_delta};
}

double capacity_benchmark(const PlantSpec& plant, double price) {
    double hourly = 0.0;
    if (plant.units.size() == 1) {
        hourly = payoff_single(plant.units[0].q_max, price, plant.units[0]);
    } else if (plant.capacity_convention == CapacityConvention::TotalCapacity) {
        const double q_total = plant.units[0].q_max + plant.units[1].q_max;
        hourly = payoff_two(q_total, price, plant.units[0], plant.units[1],
                            plant.delta_grid_size)
                     .first;
    } else {
        hourly = payoff_two(plant.units[0].q_max, price, plant.units[0], plant.units[1],
                            plant.delta_grid_size)
                     .first;
    }
    return hourly * kHoursPerDay * 365.0;
}

std::vector<double> payoff_vector(double q, double price, const PlantSpec& plant) {
    std::vector<double> f(plant.modes(), 0.0);
    f[1] = payoff_single(q, price, plant.units[0]) * kHoursPerDay;
    if (plant.units.size() == 2)
        f[2] = payoff_two(q, price, plant.units[0], plant.units[1], plant.delta_grid_size)
                   .first *
               kHoursPerDay;
    return f;
}

std::vector<std::vector<double>> relative_switch_costs(double c, int modes) {
    std::vector<std::vector<double>> costs(modes, std::vector<double>(modes, 0.0));
    for (int i = 0; i < modes; ++i)
        for (int j = 0; j < modes; ++j) {
            if (i == j) continue;
            costs[i][j] = std::abs(i - j) == 2 ? 1.5 * c : c;
        }
    return costs;
}

PlantSpec make_plant_one(double cost_c, const UnitSpec& unit) {
    PlantSpec plant;
    plant.units = {unit};
    plant.switch_costs = relative_switch_costs(cost_c, plant.modes());
    plant.validate();
    return plant;
}

PlantSpec make_plant_two(double cost_c, const UnitSpec& u1, const UnitSpec& u2) {
    PlantSpec plant;
    plant.units = {u1, u2};
    plant.switch_costs = relative_switch_costs(cost_c, plant.modes());
    plant.validate();
    return plant;
}

} // namespace ror
