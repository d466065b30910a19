#include "ror/config.hpp"

#include "ror/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace ror {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError(where + ": unknown key '" + key + "'");
}

UnitSpec parse_unit(const json& j, const std::string& where) {
    reject_unknown_keys(j, {"q_min", "q_max", "q_d", "alpha", "beta", "c_run", "c_low",
                            "head", "rho", "gravity"},
                        where);
    UnitSpec u;
    u.q_min = j.value("q_min", u.q_min);
    u.q_max = j.value("q_max", u.q_max);
    u.q_d = j.value("q_d", u.q_d);
    u.alpha = j.value("alpha", u.alpha);
    u.beta = j.value("beta", u.beta);
    u.c_run = j.value("c_run", u.c_run);
    u.c_low = j.value("c_low", u.c_low);
    u.head = j.value("head", u.head);
    u.rho = j.value("rho", u.rho);
    u.gravity = j.value("gravity", u.gravity);
    return u;
}

} // namespace

void RunConfig::validate() const {
    if (flow_csv.empty()) throw ConfigError("config: flow_csv is required");
    if (cost_ratio < 0.0) throw ConfigError("config: cost_ratio must be >= 0");
    if (forecast_days < 0 || forecast_days > 365)
        throw ConfigError("config: forecast days must lie in [0, 365]");
    for (int l : forecast_lengths)
        if (l < 0 || l > 365)
            throw ConfigError("config: forecast_lengths entries must lie in [0, 365]");
    if (relax_days < 1) throw ConfigError("config: relax_days must be >= 1");
    if (grid_nodes < 51) throw ConfigError("config: grid nodes must be >= 51");
    if (grid_padding_sd <= 0.0) throw ConfigError("config: grid padding must be positive");
    if (spatial_tol_rel <= 0.0 || total_tol_rel <= 0.0)
        throw ConfigError("config: tolerances must be positive");
    if (max_outer < 1 || max_inner < 1)
        throw ConfigError("config: iteration limits must be positive");
    if (n_paths < 1) throw ConfigError("config: paths must be >= 1");
    if (window_days < 1 || window_days % 2 == 0)
        throw ConfigError("config: window_days must be odd and positive");
    if (max_lag_days < 1) throw ConfigError("config: max_lag_days must be >= 1");
    if (sweep_steps < 2 || !(sweep_to > sweep_from) || sweep_from < 0.0)
        throw ConfigError("config: sweep needs 0 <= from < to and >= 2 steps");
    if (year_from != 0 && year_to != 0 && year_from > year_to)
        throw ConfigError("config: years.from must not exceed years.to");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }

    reject_unknown_keys(j, {"flow_csv", "calibration_file", "out_dir", "price",
                            "cost_ratio", "switch_costs", "forecast", "forecast_lengths",
                            "years", "plant", "grid", "tolerances", "seed", "paths",
                            "calibration", "sweep"},
                        "config");

    RunConfig cfg;
    try {
        cfg.flow_csv = j.value("flow_csv", std::string{});
        cfg.calibration_file = j.value("calibration_file", std::string{});
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.price = j.value("price", cfg.price);
        cfg.cost_ratio = j.value("cost_ratio", cfg.cost_ratio);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.n_paths = j.value("paths", cfg.n_paths);

        if (j.contains("forecast")) {
            const auto& f = j["forecast"];
            reject_unknown_keys(f, {"days", "relax_days"}, "config.forecast");
            cfg.forecast_days = f.value("days", cfg.forecast_days);
            cfg.relax_days = f.value("relax_days", cfg.relax_days);
        }
        if (j.contains("forecast_lengths"))
            cfg.forecast_lengths = j["forecast_lengths"].get<std::vector<int>>();
        if (j.contains("years")) {
            const auto& y = j["years"];
            reject_unknown_keys(y, {"from", "to"}, "config.years");
            cfg.year_from = y.value("from", 0);
            cfg.year_to = y.value("to", 0);
        }

        int n_units = 1;
        UnitSpec u1, u2;
        bool has_u2 = false;
        if (j.contains("plant")) {
            const auto& p = j["plant"];
            reject_unknown_keys(p, {"units", "unit1", "unit2", "delta_grid_size",
                                    "capacity_convention", "allow_negative_switch_costs"},
                                "config.plant");
            n_units = p.value("units", 1);
            if (n_units < 1 || n_units > 2)
                throw ConfigError("config.plant: units must be 1 or 2");
            if (p.contains("unit1")) u1 = parse_unit(p["unit1"], "config.plant.unit1");
            if (p.contains("unit2")) {
                u2 = parse_unit(p["unit2"], "config.plant.unit2");
                has_u2 = true;
            }
            cfg.plant.delta_grid_size = p.value("delta_grid_size", cfg.plant.delta_grid_size);
            cfg.plant.allow_negative_switch_costs =
                p.value("allow_negative_switch_costs", false);
            const std::string conv = p.value("capacity_convention", "total_capacity");
            if (conv == "total_capacity")
                cfg.plant.capacity_convention = CapacityConvention::TotalCapacity;
            else if (conv == "per_unit_q_max")
                cfg.plant.capacity_convention = CapacityConvention::PerUnitQMax;
            else
                throw ConfigError("config.plant: capacity_convention must be "
                                  "'total_capacity' or 'per_unit_q_max'");
        }
        cfg.plant.units = {u1};
        if (n_units == 2) cfg.plant.units.push_back(has_u2 ? u2 : u1);

        if (j.contains("switch_costs")) {
            cfg.explicit_costs = j["switch_costs"].get<std::vector<std::vector<double>>>();
            cfg.has_explicit_costs = true;
        }

        if (j.contains("grid")) {
            const auto& g = j["grid"];
            reject_unknown_keys(g, {"nodes", "padding_sd"}, "config.grid");
            cfg.grid_nodes = g.value("nodes", cfg.grid_nodes);
            cfg.grid_padding_sd = g.value("padding_sd", cfg.grid_padding_sd);
        }
        if (j.contains("tolerances")) {
            const auto& t = j["tolerances"];
            reject_unknown_keys(t, {"spatial_rel", "total_rel", "max_outer", "max_inner"},
                                "config.tolerances");
            cfg.spatial_tol_rel = t.value("spatial_rel", cfg.spatial_tol_rel);
            cfg.total_tol_rel = t.value("total_rel", cfg.total_tol_rel);
            cfg.max_outer = t.value("max_outer", cfg.max_outer);
            cfg.max_inner = t.value("max_inner", cfg.max_inner);
        }
        if (j.contains("calibration")) {
            const auto& c = j["calibration"];
            reject_unknown_keys(c, {"window_days", "max_lag_days"}, "config.calibration");
            cfg.window_days = c.value("window_days", cfg.window_days);
            cfg.max_lag_days = c.value("max_lag_days", cfg.max_lag_days);
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            reject_unknown_keys(s, {"from", "to", "steps"}, "config.sweep");
            cfg.sweep_from = s.value("from", cfg.sweep_from);
            cfg.sweep_to = s.value("to", cfg.sweep_to);
            cfg.sweep_steps = s.value("steps", cfg.sweep_steps);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }

    cfg.validate();
    return cfg;
}

} // namespace ror
