#include "ror/dynamics.hpp"

#include "ror/errors.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <utility>

namespace ror {

DriftSpec::DriftSpec(int start_index, SeasonalProfile profile, OUParams ou)
    : k_(start_index), profile_(std::move(profile)), ou_(ou) {}

DriftSpec::DriftSpec(int start_index, double q_now, const ForecastSpec& forecast,
                     SeasonalProfile profile, OUParams ou)
    : k_(start_index), profile_(std::move(profile)), ou_(ou) {
    if (!(q_now > 0.0)) throw DataError("build_drift: current flow must be positive");
    if (forecast.start_index != start_index)
        throw DataError("build_drift: forecast start_index does not match");
    if (forecast.relax_days < 1)
        throw DataError("build_drift: relax_days must be >= 1");

    const int l = forecast.horizon();
    if (l == 0) return; // no forecast: plain seasonal dynamics everywhere

    for (double f : forecast.values)
        if (!(f > 0.0)) throw DataError("build_drift: non-positive forecast value");

    const int ell = forecast.relax_days;
    g_.resize(static_cast<std::size_t>(l + ell) + 1);
    g_[0] = std::log(q_now);
    for (int i = 1; i <= l; ++i) g_[i] = std::log(forecast.values[i - 1]);

    // Linear return from the last forecast value to the seasonal mean; the
    // endpoint lands on r exactly.
    const double log_f_last = g_[l];
    const double r_end = profile_.r_at(k_ + l + ell);
    const double slope = (r_end - log_f_last) / static_cast<double>(ell);
    for (int i = 1; i < ell; ++i) g_[l + i] = log_f_last + slope * i;
    g_[l + ell] = r_end;

    g_prime_.resize(g_.size());
    for (std::size_t i = 1; i < g_.size(); ++i) g_prime_[i] = g_[i] - g_[i - 1];
    g_prime_[0] = g_.size() > 1 ? g_[1] - g_[0] : 0.0;
}

DriftSpec build_drift(int start_index, double q_now, const ForecastSpec& forecast,
                      const SeasonalProfile& profile, const OUParams& ou) {
    if (forecast.horizon() == 0) return DriftSpec(start_index, profile, ou);
    return DriftSpec(start_index, q_now, forecast, profile, ou);
}

double DriftSpec::g(int t) const {
    const int off = t - k_;
    if (!g_.empty() && off >= 0 && off < static_cast<int>(g_.size()))
        return g_[off];
    return profile_.r_at(t);
}

double DriftSpec::g_prime(int t) const {
    const int off = t - k_;
    if (!g_.empty() && off >= 0 && off < static_cast<int>(g_.size()))
        return g_prime_[off];
    return profile_.r_prime_at(t);
}

double DriftSpec::drift_q(double q, int t) const {
    if (!(q > 0.0)) throw DataError("drift_q: flow must be positive");
    const double gv = g(t);
    const double gp = g_prime(t);
    return (gp + 0.5 * diffusion_sq() - ou_.kappa * (std::log(q) - gv)) * q;
}

double DriftSpec::drift_log(double x, int t) const {
    return g_prime(t) - ou_.kappa * (x - g(t));
}

PathSet simulate_paths(double q0, const DriftSpec& spec, int n_paths, int n_steps,
                       double dt, std::uint64_t seed) {
    if (!(q0 > 0.0)) throw DataError("simulate_paths: q0 must be positive");
    if (!(dt > 0.0)) throw DataError("simulate_paths: dt must be positive");
    if (n_paths < 1 || n_steps < 1)
        throw DataError("simulate_paths: need at least one path and one step");

    PathSet out;
    out.seed = seed;
    out.dt = dt;
    out.paths.assign(n_paths, std::vector<double>(n_steps));

    const double x0 = std::log(q0);
    const double sigma_sqrt_dt = spec.ou().sigma * std::sqrt(dt);
    for (int p = 0; p < n_paths; ++p) {
        std::seed_seq seq{seed, static_cast<std::uint64_t>(p)};
        std::mt19937_64 engine(seq);
        std::normal_distribution<double> normal(0.0, 1.0);

        double x = x0;
        out.paths[p][0] = q0;
        for (int s = 1; s < n_steps; ++s) {
            const double time = spec.start_index() + (s - 1) * dt;
            const int day = static_cast<int>(std::floor(time));
            x += spec.drift_log(x, day) * dt + sigma_sqrt_dt * normal(engine);
            out.paths[p][s] = std::exp(x);
        }
    }
    return out;
}

void write_paths_csv(const PathSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write path CSV '" + path + "'");
    out << "day";
    for (std::size_t p = 0; p < set.n_paths(); ++p) out << ",path_" << p;
    out << "\n";
    out.precision(10);
    for (std::size_t s = 0; s < set.n_steps(); ++s) {
        out << s * set.dt;
        for (std::size_t p = 0; p < set.n_paths(); ++p) out << "," << set.paths[p][s];
        out << "\n";
    }
}

} // namespace ror
