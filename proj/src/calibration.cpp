#include "ror/calibration.hpp"

#include "ror/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace ror {

double SeasonalProfile::min_log_mean() const {
    return *std::min_element(log_mean.begin(), log_mean.end());
}

double SeasonalProfile::max_log_mean() const {
    return *std::max_element(log_mean.begin(), log_mean.end());
}

double OUParams::asymptotic_sd() const { return std::sqrt(asymptotic_variance()); }

SeasonalProfile seasonal_log_mean(const FlowSeries& data, int window_days) {
    if (data.empty()) throw DataError("seasonal_log_mean: empty series");
    if (window_days < 1 || window_days % 2 == 0)
        throw DataError("seasonal_log_mean: window_days must be odd and positive");

    // Pool log-flows by day-of-year.
    std::array<double, 365> sums{};
    std::array<int, 365> counts{};
    for (const auto& rec : data.records) {
        const int idx = rec.date.day_of_year_365() - 1;
        sums[idx] += std::log(rec.flow);
        counts[idx] += 1;
    }
    if (std::any_of(counts.begin(), counts.end(), [](int c) { return c == 0; }))
        throw DataError("seasonal_log_mean: need at least one full year of data");

    SeasonalProfile profile;
    const int half = window_days / 2;
    for (int d = 0; d < 365; ++d) {
        double sum = 0.0;
        long n = 0;
        for (int o = -half; o <= half; ++o) {
            const int idx = SeasonalProfile::index_of(d + o);
            sum += sums[idx];
            n += counts[idx];
        }
        profile.log_mean[d] = sum / static_cast<double>(n);
    }
    for (int d = 0; d < 365; ++d) {
        const double up = profile.log_mean[SeasonalProfile::index_of(d + 1)];
        const double dn = profile.log_mean[SeasonalProfile::index_of(d - 1)];
        profile.log_mean_derivative[d] = 0.5 * (up - dn);
    }
    return profile;
}

ResidualSeries residuals(const FlowSeries& data, const SeasonalProfile& profile) {
    ResidualSeries res;
    res.day_index.reserve(data.size());
    res.values.reserve(data.size());
    int i = 0;
    for (const auto& rec : data.records) {
        res.day_index.push_back(i++);
        res.values.push_back(std::log(rec.flow) -
                             profile.log_mean[rec.date.day_of_year_365() - 1]);
    }
    return res;
}

OUEstimate estimate_ou(const ResidualSeries& res, int max_lag_days) {
    if (max_lag_days < 1) throw DataError("estimate_ou: max_lag_days must be >= 1");
    const std::size_t n = res.size();
    if (n < 10 * static_cast<std::size_t>(max_lag_days))
        throw DataError("estimate_ou: need at least 10*max_lag_days residuals, got " +
                        std::to_string(n));

    const double mean = std::accumulate(res.values.begin(), res.values.end(), 0.0) /
                        static_cast<double>(n);
    std::vector<double> s(res.values);
    for (double& v : s) v -= mean;

    double sq = 0.0;
    for (double v : s) sq += v * v;
    const double variance = sq / static_cast<double>(n - 1);
    if (!(variance > 1e-20)) throw DataError("estimate_ou: residuals have zero variance");

    // Sample ACF with the standard 1/n normalization.
    std::vector<int> lags;
    std::vector<double> log_acf;
    for (int tau = 1; tau <= max_lag_days; ++tau) {
        double acc = 0.0;
        for (std::size_t i = 0; i + tau < n; ++i) acc += s[i] * s[i + tau];
        const double acf = acc / sq;
        if (acf > 0.0) {
            lags.push_back(tau);
            log_acf.push_back(std::log(acf));
        }
    }
    if (lags.size() < 2)
        throw DataError("estimate_ou: fewer than two usable lags with positive ACF");

    // Least-squares line log ACF = a + b * lag; kappa = -b.
    const double m = static_cast<double>(lags.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        sx += lags[i];
        sy += log_acf[i];
        sxx += static_cast<double>(lags[i]) * lags[i];
        sxy += lags[i] * log_acf[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double kappa = -slope;
    if (!(kappa > 0.0))
        throw DataError("estimate_ou: autocorrelation does not decay (kappa <= 0)");

    OUEstimate est;
    est.params.kappa = kappa;
    est.params.sigma = std::sqrt(2.0 * kappa * variance);
    est.lags_used = std::move(lags);
    est.sample_variance = variance;
    return est;
}

void save_calibration(const CalibrationResult& calib, const std::string& path) {
    nlohmann::json j;
    j["kappa"] = calib.ou.kappa;
    j["sigma"] = calib.ou.sigma;
    j["log_mean"] = calib.profile.log_mean;
    j["log_mean_derivative"] = calib.profile.log_mean_derivative;
    j["window_days"] = calib.window_days;
    j["max_lag_days"] = calib.max_lag_days;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write calibration file '" + path + "'");
    out << j.dump(2) << "\n";
}

CalibrationResult load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open calibration file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("calibration file '" + path + "': " + e.what());
    }
    CalibrationResult calib;
    try {
        calib.ou.kappa = j.at("kappa").get<double>();
        calib.ou.sigma = j.at("sigma").get<double>();
        const auto& lm = j.at("log_mean");
        const auto& ld = j.at("log_mean_derivative");
        if (lm.size() != 365 || ld.size() != 365)
            throw DataError("calibration file '" + path + "': profile arrays must have 365 entries");
        for (int d = 0; d < 365; ++d) {
            calib.profile.log_mean[d] = lm[d].get<double>();
            calib.profile.log_mean_derivative[d] = ld[d].get<double>();
        }
        calib.window_days = j.at("window_days").get<int>();
        calib.max_lag_days = j.at("max_lag_days").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("calibration file '" + path + "': " + e.what());
    }
    if (!(calib.ou.kappa > 0.0) || !(calib.ou.sigma > 0.0))
        throw DataError("calibration file '" + path + "': kappa and sigma must be positive");
    return calib;
}

} // namespace ror
