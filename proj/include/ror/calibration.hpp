#pragma once

#include "ror/flow_series.hpp"

#include <array>
#include <string>
#include <vector>

namespace ror {

/// Day-of-year expected log-flow r and its derivative r', both length 365.
/// Index d corresponds to day-of-year d+1; lookups are circular.
struct SeasonalProfile {
    std::array<double, 365> log_mean{};
    std::array<double, 365> log_mean_derivative{};

    /// r at grid time t (days since Jan 1 of some year), circular.
    double r_at(int t) const { return log_mean[index_of(t)]; }
    double r_prime_at(int t) const { return log_mean_derivative[index_of(t)]; }

    static int index_of(int t) {
        int i = t % 365;
        return i < 0 ? i + 365 : i;
    }

    double min_log_mean() const;
    double max_log_mean() const;
};

/// Mean-reversion rate (per day) and volatility (per sqrt(day)) of the
/// log-flow residual process.
struct OUParams {
    double kappa = 0.0;
    double sigma = 0.0;

    double asymptotic_variance() const { return sigma * sigma / (2.0 * kappa); }
    double asymptotic_sd() const;
};

/// Residuals s = log Q - r, one entry per cleaned flow record. On the
/// calibration data itself the sample mean is 0 up to rounding when the
/// series consists of whole years (the pooled window average telescopes).
struct ResidualSeries {
    std::vector<int> day_index;  // 0-based position in the cleaned series
    std::vector<double> values;  // dimensionless

    std::size_t size() const { return values.size(); }
};

/// Pooled centered moving average of the log-flow by day-of-year, circular
/// across the year boundary; derivative by circular central difference.
/// window_days must be odd. Requires every day-of-year to be observed.
SeasonalProfile seasonal_log_mean(const FlowSeries& data, int window_days = 7);

ResidualSeries residuals(const FlowSeries& data, const SeasonalProfile& profile);

struct OUEstimate {
    OUParams params;
    std::vector<int> lags_used;   // lags with positive sample ACF that entered the fit
    double sample_variance = 0.0; // of the de-meaned residuals (n-1 denominator)
};

/// kappa = -slope of the least-squares line through (lag, log ACF(lag)) over
/// lags 1..max_lag_days with positive ACF; sigma = sqrt(2 kappa variance).
/// Residuals are de-meaned before the ACF and variance are computed.
OUEstimate estimate_ou(const ResidualSeries& res, int max_lag_days = 30);

/// Calibration artifact persisted between the calibrate and plan/backtest
/// steps. JSON keys: kappa, sigma, log_mean[365], log_mean_derivative[365],
/// window_days, max_lag_days.
struct CalibrationResult {
    SeasonalProfile profile;
    OUParams ou;
    int window_days = 7;
    int max_lag_days = 30;
};

void save_calibration(const CalibrationResult& calib, const std::string& path);
CalibrationResult load_calibration(const std::string& path);

} // namespace ror
