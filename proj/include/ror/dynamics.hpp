#pragma once

#include "ror/calibration.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ror {

/// Flow forecast for days start_index+1 .. start_index+horizon, plus the
/// number of days over which the drift relaxes back to the seasonal mean.
/// horizon() == 0 means no forecast.
struct ForecastSpec {
    int start_index = 0;          // day index k of the current observation
    std::vector<double> values;   // forecast flows (m^3/s) for days k+1..k+l
    int relax_days = 20;          // ell

    int horizon() const { return static_cast<int>(values.size()); }
};

/// Drift specification on the daily grid: either the plain seasonal
/// dynamics (no forecast), or the forecast-blended g on [k, k+l+ell] with
/// the seasonal dynamics beyond. g' uses the backward difference on the
/// grid (forward at the anchor day itself, where no earlier node exists).
class DriftSpec {
public:
    /// Seasonal-only drift anchored at day k (used when horizon() == 0).
    DriftSpec(int start_index, SeasonalProfile profile, OUParams ou);

    /// Forecast-blended drift. q_now is the observed flow on day k.
    DriftSpec(int start_index, double q_now, const ForecastSpec& forecast,
              SeasonalProfile profile, OUParams ou);

    int start_index() const { return k_; }
    bool has_forecast() const { return !g_.empty(); }
    /// Last day index on which the blended g applies (k+l+ell, capped at
    /// the end of sampling); meaningless without a forecast.
    int window_end() const { return k_ + static_cast<int>(g_.size()) - 1; }

    const SeasonalProfile& profile() const { return profile_; }
    const OUParams& ou() const { return ou_; }

    /// Blended log-mean and its discrete derivative at grid time t.
    /// Falls back to (r, r') outside the forecast window.
    double g(int t) const;
    double g_prime(int t) const;

    /// Drift of the flow SDE in natural units, m^3/s per day.
    double drift_q(double q, int t) const;

    /// Log-space drift (per day) and squared diffusion (per day) used by
    /// the PDE solver and the path simulator.
    double drift_log(double x, int t) const;
    double diffusion_sq() const { return ou_.sigma * ou_.sigma; }

private:
    int k_ = 0;
    SeasonalProfile profile_;
    OUParams ou_;
    std::vector<double> g_;        // g(t_k .. t_{k+l+ell}); empty = no forecast
    std::vector<double> g_prime_;  // same indexing
};

DriftSpec build_drift(int start_index, double q_now, const ForecastSpec& forecast,
                      const SeasonalProfile& profile, const OUParams& ou);

/// Simulated flow paths, n_paths x n_steps, all entries positive.
struct PathSet {
    std::vector<std::vector<double>> paths; // [path][step], flow m^3/s
    std::uint64_t seed = 0;
    double dt = 1.0; // days

    std::size_t n_paths() const { return paths.size(); }
    std::size_t n_steps() const { return paths.empty() ? 0 : paths.front().size(); }
};

/// Euler-Maruyama in log-flow coordinates: x_{n+1} = x_n + b dt + sigma
/// sqrt(dt) Z. The first column holds q0. Each path runs on its own
/// deterministic substream of the root seed.
PathSet simulate_paths(double q0, const DriftSpec& spec, int n_paths, int n_steps,
                       double dt, std::uint64_t seed);

/// One column per path, preceded by the time in days.
void write_paths_csv(const PathSet& paths, const std::string& path);

} // namespace ror
