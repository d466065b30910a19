#include "ror/backtest.hpp"
#include "ror/config.hpp"
#include "ror/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ror;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ror_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// Three synthetic years with a spring flood, winter below q_min.
std::string small_flow_csv(const fs::path& dir) {
    const std::string path = (dir / "flow.csv").string();
    FlowSeries series;
    std::mt19937_64 engine(123);
    std::normal_distribution<double> normal(0.0, 0.25);
    for (int year = 2001; year <= 2003; ++year) {
        Date d{year, 1, 1};
        for (int doy = 1; doy <= 365; ++doy) {
            const double dist = std::min(std::abs(doy - 130.0), 365.0 - std::abs(doy - 130.0));
            const double log_mean =
                std::log(3.0) + 2.0 * std::exp(-dist * dist / (30.0 * 30.0));
            series.records.push_back({d, std::exp(log_mean + normal(engine))});
            d = d.next_no_leap();
        }
    }
    write_flow_csv(series, path);
    return path;
}

} // namespace

TEST_CASE("a minimal config is just the flow CSV path") {
    TempDir tmp;
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, R"({"flow_csv": "flows.csv"})");
    const RunConfig cfg = load_config(cfg_path);

    CHECK(cfg.flow_csv == "flows.csv");
    CHECK(cfg.price == 1.0);
    CHECK(cfg.cost_ratio == 0.01);
    CHECK(cfg.forecast_days == 10);
    CHECK(cfg.relax_days == 20);
    CHECK(cfg.forecast_lengths == std::vector<int>{0, 5, 10});
    CHECK(cfg.plant.units.size() == 1);
    // Reference parameter set rides along as defaults.
    CHECK(cfg.plant.units[0].q_min == 5.0);
    CHECK(cfg.plant.units[0].q_max == 13.0);
    CHECK(cfg.plant.units[0].q_d == 10.0);
    CHECK(cfg.plant.units[0].alpha == 0.92);
    CHECK(cfg.plant.units[0].beta == 0.45);
    CHECK(cfg.plant.units[0].c_run == 100.0);
    CHECK(cfg.plant.units[0].c_low == 1000.0);
    CHECK(cfg.plant.units[0].head == 5.0);
}

TEST_CASE("config errors: unknown keys, bad values, missing file") {
    TempDir tmp;
    const std::string cfg_path = tmp.str("config.json");

    CHECK_THROWS_AS(load_config(tmp.str("absent.json")), ConfigError);

    write_file(cfg_path, R"({"flow_csv": "f.csv", "typo_key": 1})");
    CHECK_THROWS_WITH_AS(load_config(cfg_path), doctest::Contains("typo_key"), ConfigError);

    write_file(cfg_path, R"({"flow_csv": "f.csv", "cost_ratio": -0.5})");
    CHECK_THROWS_AS(load_config(cfg_path), ConfigError);

    write_file(cfg_path, R"({"flow_csv": "f.csv", "plant": {"units": 3}})");
    CHECK_THROWS_AS(load_config(cfg_path), ConfigError);

    write_file(cfg_path, R"({"flow_csv": "f.csv", "grid": {"nodes": 10}})");
    CHECK_THROWS_AS(load_config(cfg_path), ConfigError);

    write_file(cfg_path, "{not json");
    CHECK_THROWS_AS(load_config(cfg_path), ConfigError);
}

TEST_CASE("two-unit heterogeneous plant from config") {
    TempDir tmp;
    const std::string cfg_path = tmp.str("config.json");
    write_file(cfg_path, R"({
        "flow_csv": "f.csv",
        "plant": {"units": 2, "unit2": {"q_min": 4.0, "q_max": 11.0, "q_d": 8.0}}
    })");
    const RunConfig cfg = load_config(cfg_path);
    REQUIRE(cfg.plant.units.size() == 2);
    CHECK(cfg.plant.units[0].q_d == 10.0);
    CHECK(cfg.plant.units[1].q_d == 8.0);
    CHECK(cfg.plant.units[1].q_min == 4.0);
    CHECK(cfg.plant.modes() == 3);
}

TEST_CASE("cmd_calibrate writes the documented keys and recovers parameters") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.calibration_file = tmp.str("calib.json");
    cfg.out_dir = tmp.str("");

    const CalibrationResult calib = cmd_calibrate(cfg);
    CHECK(calib.ou.kappa > 0.0);
    CHECK(calib.ou.sigma > 0.0);

    const CalibrationResult loaded = load_calibration(cfg.calibration_file);
    CHECK(loaded.ou.kappa == calib.ou.kappa);
    CHECK(loaded.window_days == 7);
    CHECK(loaded.max_lag_days == 30);
    CHECK(loaded.profile.log_mean[129] > loaded.profile.log_mean[0]); // flood bump

    // Constant flow: residual variance is zero, reported as a data error.
    FlowSeries constant;
    Date d{2010, 1, 1};
    for (int doy = 1; doy <= 365; ++doy) {
        constant.records.push_back({d, 7.0});
        d = d.next_no_leap();
    }
    const std::string const_path = tmp.str("const.csv");
    write_flow_csv(constant, const_path);
    RunConfig bad = cfg;
    bad.flow_csv = const_path;
    CHECK_THROWS_AS(cmd_calibrate(bad), DataError);
}

TEST_CASE("cmd_simulate is reproducible for a fixed seed") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.out_dir = tmp.str("");
    cfg.n_paths = 3;
    cfg.seed = 99;

    const PathSet first = cmd_simulate(cfg);
    std::ifstream in1(tmp.str("paths.csv"));
    std::stringstream buf1;
    buf1 << in1.rdbuf();

    const PathSet second = cmd_simulate(cfg);
    std::ifstream in2(tmp.str("paths.csv"));
    std::stringstream buf2;
    buf2 << in2.rdbuf();

    CHECK(first.n_paths() == 3);
    CHECK(first.n_steps() == 366);
    CHECK(buf1.str() == buf2.str());
    for (const auto& path : first.paths)
        for (double q : path) CHECK(q > 0.0);
}

TEST_CASE("cmd_backtest produces dominated strategies and recomputable averages") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.out_dir = tmp.str("");
    cfg.forecast_lengths = {0, 5};
    cfg.grid_nodes = 101;
    cfg.cost_ratio = 0.01;

    const BacktestReport report = cmd_backtest(cfg);

    // 3 years x (optimal + pde l=0 + pde l=5 + naive).
    CHECK(report.years == std::vector<int>{2001, 2002, 2003});
    CHECK(report.rows.size() == 12);
    for (const auto& row : report.rows) CHECK(row.error.empty());

    for (int year : report.years) {
        double optimal = 0.0, naive = 0.0;
        std::vector<double> pde;
        for (const auto& row : report.rows) {
            if (row.year != year) continue;
            if (row.strategy == "optimal") optimal = row.gamma;
            if (row.strategy == "naive") naive = row.gamma;
            if (row.strategy == "pde") pde.push_back(row.gamma);
        }
        CHECK(optimal >= naive);
        for (double g : pde) CHECK(optimal >= g);
    }

    // Averages equal the arithmetic mean of the yearly rows.
    for (const auto& avg : report.averages) {
        double sum = 0.0;
        int count = 0;
        for (const auto& row : report.rows) {
            if (row.strategy != avg.strategy || row.l != avg.l ||
                row.cost_ratio != avg.cost_ratio)
                continue;
            sum += row.gamma;
            ++count;
        }
        REQUIRE(count == 3);
        CHECK(avg.gamma == doctest::Approx(sum / 3.0).epsilon(1e-14));
    }

    CHECK(fs::exists(tmp.str("backtest.csv")));
    CHECK(fs::exists(tmp.str("backtest_summary.json")));

    // Reports are deterministic given config + seed.
    std::ifstream in1(tmp.str("backtest.csv"));
    std::stringstream buf1;
    buf1 << in1.rdbuf();
    cmd_backtest(cfg);
    std::ifstream in2(tmp.str("backtest.csv"));
    std::stringstream buf2;
    buf2 << in2.rdbuf();
    CHECK(buf1.str() == buf2.str());
}

TEST_CASE("cmd_sweep: free switching collapses the curves, hindsight is monotone") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.out_dir = tmp.str("");
    cfg.forecast_lengths = {0};
    cfg.grid_nodes = 101;
    cfg.year_from = 2001;
    cfg.year_to = 2001;
    cfg.sweep_from = 0.0;
    cfg.sweep_to = 0.02;
    cfg.sweep_steps = 3;

    const BacktestReport report = cmd_sweep(cfg);
    CHECK(fs::exists(tmp.str("sweep.csv")));

    // At C/D = 0 all three strategies coincide.
    double optimal0 = -1, naive0 = -2, pde0 = -3;
    for (const auto& row : report.rows) {
        if (row.cost_ratio != 0.0) continue;
        if (row.strategy == "optimal") optimal0 = row.gamma;
        if (row.strategy == "naive") naive0 = row.gamma;
        if (row.strategy == "pde") pde0 = row.gamma;
    }
    CHECK(optimal0 == naive0);
    CHECK(pde0 == doctest::Approx(optimal0).epsilon(5e-3));

    // Hindsight gamma never increases with the cost ratio.
    double previous = 1e300;
    for (double ratio : {0.0, 0.01, 0.02}) {
        for (const auto& row : report.rows)
            if (row.strategy == "optimal" && row.cost_ratio == ratio) {
                CHECK(row.gamma <= previous + 1e-12);
                previous = row.gamma;
            }
    }
}

TEST_CASE("cmd_plan reports the decision and the mode values") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.out_dir = tmp.str("");
    cfg.grid_nodes = 101;
    cfg.forecast_days = 5;

    // Deep winter, low flow, plant off: stay off.
    const PlanResult off = cmd_plan(cfg, Date{2002, 1, 10}, 2.5, 0);
    CHECK(!off.switch_now);
    CHECK(off.values.size() == 2);
    CHECK(off.payoffs[0] == 0.0);
    CHECK(off.forecast_days_used == 5);

    // Spring flood, strong flow, plant off: start it.
    const PlanResult on = cmd_plan(cfg, Date{2002, 5, 10}, 18.0, 0);
    CHECK(on.switch_now);
    CHECK(on.target == 1);
    CHECK(on.values[1] > on.values[0]);

    CHECK_THROWS_AS(cmd_plan(cfg, Date{2002, 5, 10}, -1.0, 0), DataError);
    CHECK_THROWS_AS(cmd_plan(cfg, Date{2002, 5, 10}, 5.0, 7), ConfigError);
}

TEST_CASE("gamma is rejected when the price makes D non-positive") {
    TempDir tmp;
    RunConfig cfg;
    cfg.flow_csv = small_flow_csv(tmp.path);
    cfg.out_dir = tmp.str("");
    cfg.price = 0.0;
    CHECK_THROWS_AS(cmd_backtest(cfg), ConfigError);
}
